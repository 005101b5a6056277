#pragma once

// Limit law M_{r,alpha,gamma,lambda} of the normalized maximum daily
// precipitation within a wet period whose length is GNB(r, gamma, lambda/n^gamma)
// and whose daily volumes have a regularly varying tail with index alpha:
//
//   F(x) = P(M < x) = ∫_0^∞ exp(-z x^-alpha) g*(z; r, gamma, lambda) dz,
//   M =d  Gbar_{r, alpha gamma, lambda} / W_alpha
//     =d  (Gbar_{r, gamma, lambda} / W_1)^(1/alpha).
//
// The law is infinitely divisible when r <= 1 and alpha gamma <= 1; that
// property is not computed here.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "precip/distributions.hpp"
#include "precip/rng.hpp"

namespace precip {

struct ExtremeParams {
  double r = 1.0;
  double alpha = 1.0;
  double gamma = 1.0;
  double lambda = 1.0;

  void validate() const;  // all four strictly positive and finite
};

void to_json(nlohmann::json& j, const ExtremeParams& p);
void from_json(const nlohmann::json& j, ExtremeParams& p);

double extreme_cdf(double x, const ExtremeParams& p);
double extreme_sf(double x, const ExtremeParams& p);
double extreme_pdf(double x, const ExtremeParams& p);
double extreme_quantile(double q, const ExtremeParams& p);

// Product representations usable for simulation.
//   Direct        Gbar_{r,alpha gamma,lambda} / W_alpha             any p
//   RatioWeibull  (lambda Z_{r,1})^(-1/(alpha gamma)) W_{alpha gamma} / W_alpha
//                                                                    r <= 1
//   TemperedSF    (S_{gamma,1} r Q_{r,1} / lambda)^(1/(alpha gamma))    gamma <= 1
//   ParetoMix     lambda^(-1/(alpha gamma)) Pi_alpha (S_{gamma,1} Z_{r,1}^(1/gamma))^(-1/alpha)
//                                                                    r, gamma <= 1
//   FoldedNormal  |X| sqrt(2 W_1) / (lambda^(1/(alpha gamma)) W_alpha S_{alpha gamma,1} Z_{r,1}^(1/(alpha gamma)))
//                                                                    r, alpha gamma <= 1
// Z_{1,1} and S_{1,1} are the constant 1.
enum class Representation { Direct, RatioWeibull, TemperedSF, ParetoMix, FoldedNormal };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& s);

// Empty string if `repr` is admissible for p, otherwise the violated
// constraint.
std::string representation_violation(Representation repr, const ExtremeParams& p);

double extreme_sample(const ExtremeParams& p, Rng& rng, Representation repr = Representation::Direct);

/// E M^delta for 0 < delta < alpha.
double extreme_moment(double delta, const ExtremeParams& p);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// 1 - F(x) estimated as the mean of exp(-x U) with
// U = lambda^(1/(alpha gamma)) W_alpha S_{alpha gamma,1} Z_{r,1}^(1/(alpha gamma)),
// i.e. through the mixed-exponential form of the tail. Requires r <= 1 and
// alpha gamma <= 1.
MonteCarloEstimate mixed_exp_tail(double x, const ExtremeParams& p, std::size_t n_draws, Rng& rng);

/// Draw of the mixing variable U above.
double mixing_scale_sample(const ExtremeParams& p, Rng& rng);

using SummandSampler = std::function<double(Rng&)>;

// Sum of N summands with N ~ GNB(count_params).
double random_sum_sample(const GGParams& count_params, const SummandSampler& summand, Rng& rng);

// Count law GNB(r, alpha, lambda / n^alpha) for the random-sum limit.
GGParams random_sum_count_params(double r, double alpha, double lambda, double n);

// Factor c_n such that c_n * sum converges to Gbar_{r, alpha/beta, 1}, where
// the summands satisfy n^-beta (X_1 + ... + X_n) -> a:
//   c_n = lambda^(beta/alpha) / (a n^beta).
double random_sum_normalizer(double a, double alpha, double beta, double lambda, double n);

struct ExtremeFit {
  ExtremeParams params;
  double hill_alpha = 0.0;     // tail index from the Hill estimator
  double moment_residual = 0.0;
  double cdf_l2 = 0.0;         // l2 distance to the empirical cdf after refinement
};

// Estimates M_{r,alpha,gamma,lambda} from positive observations: Hill
// estimate of alpha, fractional-moment matching at (0.25, 0.5, 0.75) alpha,
// then simplex refinement of the l2 distance between the model cdf and the
// empirical cdf.
ExtremeFit fit_extreme(std::span<const double> data);

}  // namespace precip

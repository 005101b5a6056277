#pragma once

// Base laws used throughout the library: generalized gamma (GG), its
// mixed-Poisson counterpart the generalized negative binomial (GNB), and the
// auxiliary variables (gamma, Weibull, positive stable, Z ratio,
// Snedecor-Fisher) that appear in their product representations.

#include <cstdint>

#include "precip/rng.hpp"

namespace precip {

// Generalized gamma law with density
//   |gamma| mu^r / Gamma(r) * x^(gamma r - 1) * exp(-mu x^gamma),  x >= 0.
// The same triple parameterizes the GNB law (Poisson with GG intensity).
struct GGParams {
  double r = 1.0;
  double gamma = 1.0;
  double mu = 1.0;

  // Throws DomainError unless r > 0, mu > 0, gamma != 0 (all finite).
  void validate() const;
};

double gg_log_pdf(double x, const GGParams& p);
double gg_pdf(double x, const GGParams& p);
double gg_cdf(double x, const GGParams& p);
double gg_sf(double x, const GGParams& p);
double gg_quantile(double q, const GGParams& p);
double gg_sample(const GGParams& p, Rng& rng);

// Mean of the GG law; requires r + 1/gamma > 0.
double gg_mean(const GGParams& p);

/// Draw of G_{r,mu}: gamma law with shape r and rate mu (mean r/mu).
double gamma_sample(double r, double mu, Rng& rng);

/// Draw of W_gamma = (-ln U)^(1/gamma); W_1 is standard exponential.
double weibull_sample(double gamma, Rng& rng);

/// Draw of the positive strictly stable S_{gamma,1} with Laplace transform
/// exp(-s^gamma), 0 < gamma <= 1 (Kanter's representation; S_{1,1} = 1).
double stable_sample(double gamma, Rng& rng);

/// Draw of Z_{r,mu} = mu (G_{r,1} + G_{1-r,1}) / G_{r,1}, 0 < r < 1.
double z_ratio_sample(double r, double mu, Rng& rng);

// Snedecor-Fisher law Q_{d1,d2} = (G_{d1,1}/d1) / (G_{d2,1}/d2) with
// independent gamma numerator and denominator. Degrees need not be integer.
// Note the parameters are the gamma shapes: the textbook F(n1, n2) law is
// Q_{n1/2, n2/2}.
double sf_cdf(double x, double d1, double d2);
double sf_sf(double x, double d1, double d2);
double sf_quantile(double q, double d1, double d2);
double sf_sample(double d1, double d2, Rng& rng);

std::uint64_t poisson_sample(double mean, Rng& rng);

double gnb_log_pmf(std::uint64_t k, const GGParams& p);
double gnb_pmf(std::uint64_t k, const GGParams& p);

// Smallest K such that the GNB mass above K is below tail_mass (or the cap).
std::uint64_t gnb_truncation_point(const GGParams& p, double tail_mass = 1e-10,
                                   std::uint64_t cap = 100000);

/// Poisson draw with random intensity gg_sample(p).
std::uint64_t gnb_sample(const GGParams& p, Rng& rng);

}  // namespace precip

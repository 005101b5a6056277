#include "precip/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "precip/errors.hpp"
#include "precip/numerics.hpp"
#include "precip/optimize.hpp"

namespace precip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The integrals below are taken over u = log t with t ~ G_{r,1}, so that
// Gbar_{r,gamma,lambda} = (t / lambda)^(1/gamma) = exp((u - log lambda) / gamma).
struct MixingIntegrand {
  const ExtremeParams& p;
  double log_lambda = std::log(p.lambda);
  double lg_r = std::lgamma(p.r);

  double log_weight(double u) const { return p.r * u - std::exp(u) - lg_r; }
  double log_z(double u) const { return (u - log_lambda) / p.gamma; }

  // Starting point near the mode of exp(log_weight(u) - c z(u)).
  double guess(double log_c) const {
    const double free_mode = std::log(p.r);
    const double damped = log_lambda + p.gamma * (std::log(p.r * p.gamma) - log_c);
    return std::min(free_mode, damped);
  }
};

double cdf_integral(double x, const ExtremeParams& p) {
  const MixingIntegrand m{p};
  const double log_c = -p.alpha * std::log(x);
  auto f = [&](double u) { return m.log_weight(u) - std::exp(log_c + m.log_z(u)); };
  return std::exp(numerics::integrate_log_concave(f, m.guess(log_c)));
}

double sf_integral(double x, const ExtremeParams& p) {
  const MixingIntegrand m{p};
  const double log_c = -p.alpha * std::log(x);
  auto f = [&](double u) { return m.log_weight(u) + std::log(-std::expm1(-std::exp(log_c + m.log_z(u)))); };
  return std::exp(numerics::integrate_log_concave(f, m.guess(log_c)));
}

void require(const std::string& violation) {
  if (!violation.empty()) throw DomainError(violation);
}

double z_or_one(double r, Rng& rng) { return r < 1.0 ? z_ratio_sample(r, 1.0, rng) : 1.0; }

double log_moment(double delta, const ExtremeParams& p) {
  const double ag = p.alpha * p.gamma;
  return std::lgamma(p.r + delta / ag) + std::lgamma(1.0 - delta / p.alpha) -
         delta / ag * std::log(p.lambda) - std::lgamma(p.r);
}

}  // namespace

void ExtremeParams::validate() const {
  for (const double v : {r, alpha, gamma, lambda}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("extreme-law parameters r, alpha, gamma, lambda must be positive and finite");
    }
  }
}

void to_json(nlohmann::json& j, const ExtremeParams& p) {
  j = nlohmann::json{{"r", p.r}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"lambda", p.lambda}};
}

void from_json(const nlohmann::json& j, ExtremeParams& p) {
  p.r = j.at("r").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.lambda = j.at("lambda").get<double>();
}

double extreme_cdf(double x, const ExtremeParams& p) {
  p.validate();
  if (!(x >= 0.0)) throw DomainError("extreme_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double direct = cdf_integral(x, p);
  return direct > 0.5 ? 1.0 - sf_integral(x, p) : direct;
}

double extreme_sf(double x, const ExtremeParams& p) {
  p.validate();
  if (!(x >= 0.0)) throw DomainError("extreme_sf: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double direct = sf_integral(x, p);
  return direct > 0.5 ? 1.0 - cdf_integral(x, p) : direct;
}

double extreme_pdf(double x, const ExtremeParams& p) {
  p.validate();
  if (!(x > 0.0)) throw DomainError("extreme_pdf: x must be positive");
  if (std::isinf(x)) return 0.0;
  // d/dx exp(-z x^-alpha) = alpha x^(-alpha-1) z exp(-z x^-alpha)
  const MixingIntegrand m{p};
  const double log_x = std::log(x);
  const double log_c = -p.alpha * log_x;
  auto f = [&](double u) {
    const double lz = m.log_z(u);
    return m.log_weight(u) + lz - std::exp(log_c + lz);
  };
  const double log_int = numerics::integrate_log_concave(f, m.guess(log_c));
  return std::exp(std::log(p.alpha) + log_c - log_x + log_int);
}

double extreme_quantile(double q, const ExtremeParams& p) {
  p.validate();
  if (!(q > 0.0 && q < 1.0)) throw DomainError("extreme_quantile: q must lie in (0, 1)");
  const double guess = std::pow(p.r / p.lambda, 1.0 / (p.alpha * p.gamma));
  if (q > 0.5) {
    const double log_tail = std::log1p(-q);
    return numerics::solve_increasing([&](double x) { return log_tail - std::log(extreme_sf(x, p)); }, guess);
  }
  return numerics::invert_cdf([&](double x) { return extreme_cdf(x, p); }, q, guess);
}

std::string to_string(Representation r) {
  switch (r) {
    case Representation::Direct: return "direct";
    case Representation::RatioWeibull: return "ratio-weibull";
    case Representation::TemperedSF: return "tempered-sf";
    case Representation::ParetoMix: return "pareto-mix";
    case Representation::FoldedNormal: return "folded-normal";
  }
  return "direct";
}

Representation representation_from_string(const std::string& s) {
  for (auto r : {Representation::Direct, Representation::RatioWeibull, Representation::TemperedSF,
                 Representation::ParetoMix, Representation::FoldedNormal}) {
    if (to_string(r) == s) return r;
  }
  throw DomainError("unknown representation '" + s + "'");
}

std::string representation_violation(Representation repr, const ExtremeParams& p) {
  const std::string name = to_string(repr);
  switch (repr) {
    case Representation::Direct:
      return {};
    case Representation::RatioWeibull:
      return p.r <= 1.0 ? std::string{} : name + " representation requires r in (0, 1]";
    case Representation::TemperedSF:
      return p.gamma <= 1.0 ? std::string{} : name + " representation requires gamma in (0, 1]";
    case Representation::ParetoMix:
      if (p.r > 1.0) return name + " representation requires r in (0, 1]";
      return p.gamma <= 1.0 ? std::string{} : name + " representation requires gamma in (0, 1]";
    case Representation::FoldedNormal:
      if (p.r > 1.0) return name + " representation requires r in (0, 1]";
      return p.alpha * p.gamma <= 1.0 ? std::string{} : name + " representation requires alpha*gamma in (0, 1]";
  }
  return {};
}

double extreme_sample(const ExtremeParams& p, Rng& rng, Representation repr) {
  p.validate();
  require(representation_violation(repr, p));
  const double ag = p.alpha * p.gamma;
  const double log_lambda = std::log(p.lambda);
  switch (repr) {
    case Representation::Direct: {
      const double log_g = std::log(gamma_sample(p.r, 1.0, rng));
      const double log_w = std::log(rng.exponential()) / p.alpha;
      return std::exp((log_g - log_lambda) / ag - log_w);
    }
    case Representation::RatioWeibull: {
      const double z = z_or_one(p.r, rng);
      const double w_num = weibull_sample(ag, rng);
      const double w_den = weibull_sample(p.alpha, rng);
      return std::exp(-(log_lambda + std::log(z)) / ag) * w_num / w_den;
    }
    case Representation::TemperedSF: {
      const double s = stable_sample(p.gamma, rng);
      const double q = sf_sample(p.r, 1.0, rng);
      return std::exp((std::log(s) + std::log(p.r * q) - log_lambda) / ag);
    }
    case Representation::ParetoMix: {
      const double pareto = std::pow(rng.exponential() / rng.exponential(), 1.0 / p.alpha);
      const double s = stable_sample(p.gamma, rng);
      const double z = z_or_one(p.r, rng);
      return std::exp(-log_lambda / ag - (std::log(s) + std::log(z) / p.gamma) / p.alpha) * pareto;
    }
    case Representation::FoldedNormal: {
      const double x = std::fabs(rng.normal());
      const double w1 = rng.exponential();
      return x * std::sqrt(2.0 * w1) / mixing_scale_sample(p, rng);
    }
  }
  return 0.0;
}

double mixing_scale_sample(const ExtremeParams& p, Rng& rng) {
  p.validate();
  const double ag = p.alpha * p.gamma;
  if (p.r > 1.0 || ag > 1.0) throw DomainError("mixing scale requires r in (0, 1] and alpha*gamma in (0, 1]");
  const double w = weibull_sample(p.alpha, rng);
  const double s = stable_sample(ag, rng);
  const double z = z_or_one(p.r, rng);
  return std::exp(std::log(p.lambda) / ag + std::log(w) + std::log(s) + std::log(z) / ag);
}

double extreme_moment(double delta, const ExtremeParams& p) {
  p.validate();
  if (!(delta > 0.0)) throw DomainError("extreme_moment: delta must be positive");
  if (!(delta < p.alpha)) throw DomainError("extreme_moment: moment of order delta >= alpha does not exist");
  return std::exp(log_moment(delta, p));
}

MonteCarloEstimate mixed_exp_tail(double x, const ExtremeParams& p, std::size_t n_draws, Rng& rng) {
  p.validate();
  if (!(x >= 0.0)) throw DomainError("mixed_exp_tail: x must be nonnegative");
  if (n_draws < 2) throw DomainError("mixed_exp_tail: need at least two draws");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    const double v = std::exp(-x * mixing_scale_sample(p, rng));
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  const double n = static_cast<double>(n_draws);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

double random_sum_sample(const GGParams& count_params, const SummandSampler& summand, Rng& rng) {
  const std::uint64_t n = gnb_sample(count_params, rng);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += summand(rng);
  return sum;
}

GGParams random_sum_count_params(double r, double alpha, double lambda, double n) {
  if (!(n > 0.0)) throw DomainError("random_sum_count_params: n must be positive");
  GGParams p{r, alpha, lambda / std::pow(n, alpha)};
  p.validate();
  return p;
}

double random_sum_normalizer(double a, double alpha, double beta, double lambda, double n) {
  for (const double v : {a, alpha, beta, lambda, n}) {
    if (!(v > 0.0)) throw DomainError("random_sum_normalizer: arguments must be positive");
  }
  return std::exp(beta / alpha * std::log(lambda) - std::log(a) - beta * std::log(n));
}

ExtremeFit fit_extreme(std::span<const double> data) {
  if (data.size() < 20) throw DomainError("fit_extreme: need at least 20 observations");
  std::vector<double> x(data.begin(), data.end());
  for (const double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("fit_extreme: observations must be positive and finite");
  }
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();

  ExtremeFit fit;
  const std::size_t k = std::min(n - 1, std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(double(n)))));
  double hill = 0.0;
  for (std::size_t i = 0; i < k; ++i) hill += std::log(x[n - 1 - i] / x[n - 1 - k]);
  hill /= static_cast<double>(k);
  if (!(hill > 0.0)) throw OptimizerError("fit_extreme: Hill estimator degenerate (tied upper order statistics)");
  fit.hill_alpha = 1.0 / hill;

  // Fractional-moment matching with alpha held at the Hill estimate.
  const double alpha = fit.hill_alpha;
  const double deltas[] = {0.25 * alpha, 0.5 * alpha, 0.75 * alpha};
  double log_emp[3];
  for (int j = 0; j < 3; ++j) {
    double s = 0.0;
    for (const double v : x) s += std::pow(v, deltas[j]);
    log_emp[j] = std::log(s / static_cast<double>(n));
  }
  // Box of e^-6..e^6 on each parameter: with a biased Hill estimate the
  // moment equations can drift towards r, lambda -> infinity.
  auto moment_obj = [&](std::span<const double> t) {
    for (const double v : t) {
      if (!(std::fabs(v) < 6.0)) return kInf;
    }
    const ExtremeParams p{std::exp(t[0]), alpha, std::exp(t[1]), std::exp(t[2])};
    double ss = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double d = log_emp[j] - log_moment(deltas[j], p);
      ss += d * d;
    }
    return ss;
  };
  NelderMeadOptions nm;
  nm.f_tol = 1e-12;
  nm.x_tol = 1e-9;
  nm.max_evaluations = 4000;
  nm.initial_step = 0.3;
  std::vector<double> best;
  double best_value = kInf;
  for (double r0 : {0.5, 1.0, 2.0}) {
    for (double g0 : {0.5, 1.0, 2.0}) {
      // lambda chosen so the first moment equation holds exactly.
      const ExtremeParams unit{r0, alpha, g0, 1.0};
      const double ll =
          std::clamp(alpha * g0 / deltas[0] * (log_moment(deltas[0], unit) - log_emp[0]), -5.5, 5.5);
      const auto res = nelder_mead(moment_obj, {std::log(r0), std::log(g0), ll}, nm);
      if (res.value < best_value) {
        best_value = res.value;
        best = res.x;
      }
    }
  }
  if (best.empty()) throw OptimizerError("fit_extreme: moment matching failed from every start");
  fit.moment_residual = best_value;

  // Refine all four parameters against the empirical cdf.
  const std::size_t n_points = std::min<std::size_t>(n, 100);
  std::vector<double> pts(n_points), emp(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const std::size_t idx = std::min(n - 1, static_cast<std::size_t>((i + 0.5) * double(n) / double(n_points)));
    pts[i] = x[idx];
    emp[i] = (static_cast<double>(idx) + 0.5) / static_cast<double>(n);
  }
  auto cdf_obj = [&](std::span<const double> t) {
    for (const double v : t) {
      if (!(std::fabs(v) < 10.0)) return kInf;
    }
    const ExtremeParams p{std::exp(t[0]), std::exp(t[1]), std::exp(t[2]), std::exp(t[3])};
    double ss = 0.0;
    try {
      for (std::size_t i = 0; i < n_points; ++i) {
        const double d = extreme_cdf(pts[i], p) - emp[i];
        ss += d * d;
      }
    } catch (const NumericalError&) {
      return kInf;
    }
    return std::sqrt(ss / static_cast<double>(n_points));
  };
  NelderMeadOptions refine;
  refine.f_tol = 1e-8;
  refine.x_tol = 1e-6;
  refine.max_evaluations = 1500;
  refine.initial_step = 0.1;
  const auto res = nelder_mead(cdf_obj, {best[0], std::log(alpha), best[1], best[2]}, refine);
  if (!std::isfinite(res.value)) throw OptimizerError("fit_extreme: cdf refinement diverged");
  fit.params = ExtremeParams{std::exp(res.x[0]), std::exp(res.x[1]), std::exp(res.x[2]), std::exp(res.x[3])};
  fit.cdf_l2 = res.value;
  return fit;
}

}  // namespace precip

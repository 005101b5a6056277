#include "precip/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "precip/errors.hpp"
#include "precip/numerics.hpp"
#include "precip/special.hpp"

namespace precip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void require_nonnegative_x(double x, const char* fn) {
  if (!(x >= 0.0)) throw DomainError(std::string(fn) + ": x must be nonnegative");
}

}  // namespace

void GGParams::validate() const {
  require_positive(r, "GG shape r");
  require_positive(mu, "GG scale mu");
  if (gamma == 0.0 || !std::isfinite(gamma)) throw DomainError("GG power gamma must be nonzero and finite");
}

double gg_log_pdf(double x, const GGParams& p) {
  p.validate();
  require_nonnegative_x(x, "gg_pdf");
  const double log_norm = std::log(std::fabs(p.gamma)) + p.r * std::log(p.mu) - log_gamma_fn(p.r);
  if (x == 0.0) {
    if (p.gamma < 0.0) return -kInf;
    const double power = p.gamma * p.r - 1.0;
    if (power < 0.0) return kInf;
    return power == 0.0 ? log_norm : -kInf;
  }
  if (std::isinf(x)) return -kInf;
  const double lx = std::log(x);
  return log_norm + (p.gamma * p.r - 1.0) * lx - p.mu * std::exp(p.gamma * lx);
}

double gg_pdf(double x, const GGParams& p) { return std::exp(gg_log_pdf(x, p)); }

double gg_cdf(double x, const GGParams& p) {
  p.validate();
  require_nonnegative_x(x, "gg_cdf");
  if (x == 0.0) return 0.0;
  const double t = p.mu * std::pow(x, p.gamma);
  return p.gamma > 0.0 ? reg_inc_gamma(p.r, t) : reg_inc_gamma_upper(p.r, t);
}

double gg_sf(double x, const GGParams& p) {
  p.validate();
  require_nonnegative_x(x, "gg_sf");
  if (x == 0.0) return 1.0;
  const double t = p.mu * std::pow(x, p.gamma);
  return p.gamma > 0.0 ? reg_inc_gamma_upper(p.r, t) : reg_inc_gamma(p.r, t);
}

double gg_quantile(double q, const GGParams& p) {
  p.validate();
  if (!(q > 0.0 && q < 1.0)) throw DomainError("gg_quantile: q must lie in (0, 1)");
  const double guess = std::pow(p.r / p.mu, 1.0 / p.gamma);
  return numerics::invert_cdf([&](double x) { return gg_cdf(x, p); }, q, guess);
}

double gg_mean(const GGParams& p) {
  p.validate();
  const double shifted = p.r + 1.0 / p.gamma;
  if (!(shifted > 0.0)) throw DomainError("gg_mean: mean is infinite for r + 1/gamma <= 0");
  return std::exp(-std::log(p.mu) / p.gamma + std::lgamma(shifted) - std::lgamma(p.r));
}

double gamma_sample(double r, double mu, Rng& rng) {
  require_positive(r, "gamma shape");
  require_positive(mu, "gamma rate");
  if (r < 1.0) {
    // G_r = G_{r+1} * U^(1/r), evaluated in logs so tiny shapes do not
    // lose the whole draw to underflow of U^(1/r) before scaling.
    const double g = gamma_sample(r + 1.0, 1.0, rng);
    return std::exp(std::log(g) + std::log(rng.uniform()) / r) / mu;
  }
  // Marsaglia & Tsang squeeze method.
  const double d = r - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / mu;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / mu;
  }
}

double weibull_sample(double gamma, Rng& rng) {
  require_positive(gamma, "Weibull power");
  return std::pow(rng.exponential(), 1.0 / gamma);
}

double stable_sample(double gamma, Rng& rng) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("stable_sample: gamma must lie in (0, 1]");
  if (gamma == 1.0) return 1.0;
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double log_sin_gu = std::log(std::sin(gamma * u));
  const double log_a = (log_sin_gu - std::log(std::sin(u))) / (1.0 - gamma) +
                       std::log(std::sin((1.0 - gamma) * u)) - log_sin_gu;
  return std::exp((1.0 - gamma) / gamma * (log_a - std::log(e)));
}

double z_ratio_sample(double r, double mu, Rng& rng) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("z_ratio_sample: r must lie in (0, 1)");
  require_positive(mu, "Z scale mu");
  const double a = gamma_sample(r, 1.0, rng);
  const double b = gamma_sample(1.0 - r, 1.0, rng);
  return mu * (1.0 + b / a);
}

double sf_cdf(double x, double d1, double d2) {
  require_positive(d1, "Snedecor-Fisher d1");
  require_positive(d2, "Snedecor-Fisher d2");
  require_nonnegative_x(x, "sf_cdf");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double denom = d1 * x + d2;
  if (d1 * x <= d2) return reg_inc_beta(d1, d2, d1 * x / denom);
  return reg_inc_beta_upper(d2, d1, d2 / denom);
}

double sf_sf(double x, double d1, double d2) {
  require_positive(d1, "Snedecor-Fisher d1");
  require_positive(d2, "Snedecor-Fisher d2");
  require_nonnegative_x(x, "sf_sf");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double denom = d1 * x + d2;
  if (d1 * x <= d2) return reg_inc_beta_upper(d1, d2, d1 * x / denom);
  return reg_inc_beta(d2, d1, d2 / denom);
}

double sf_quantile(double q, double d1, double d2) {
  require_positive(d1, "Snedecor-Fisher d1");
  require_positive(d2, "Snedecor-Fisher d2");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("sf_quantile: q must lie in (0, 1)");
  if (q > 0.5) {
    // Solve in the upper tail so 1 - q keeps its relative precision.
    const double log_tail = std::log1p(-q);
    return numerics::solve_increasing(
        [&](double x) { return log_tail - std::log(sf_sf(x, d1, d2)); }, 1.0);
  }
  return numerics::invert_cdf([&](double x) { return sf_cdf(x, d1, d2); }, q, 1.0);
}

double sf_sample(double d1, double d2, Rng& rng) {
  const double num = gamma_sample(d1, 1.0, rng) / d1;
  return num / (gamma_sample(d2, 1.0, rng) / d2);
}

std::uint64_t poisson_sample(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson_sample: mean must be finite and nonnegative");
  if (mean > 4e18) throw NumericalError("poisson_sample: mean exceeds the representable count range");
  if (mean == 0.0) return 0;
  if (mean < 12.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze (PTRS).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double gg_sample(const GGParams& p, Rng& rng) {
  p.validate();
  return std::exp(std::log(gamma_sample(p.r, p.mu, rng)) / p.gamma);
}

double gnb_log_pmf(std::uint64_t k, const GGParams& p) {
  p.validate();
  // In u = log z the integrand of (1/k!) ∫ e^{-z} z^k g*(z) dz becomes
  //   exp(c + (k + gamma r) u - e^u - mu e^{gamma u}),
  // which is log-concave for either sign of gamma.
  const double kk = static_cast<double>(k);
  const double slope = kk + p.gamma * p.r;
  const double c = std::log(std::fabs(p.gamma)) + p.r * std::log(p.mu) - std::lgamma(p.r) -
                   std::lgamma(kk + 1.0);
  // Re-centred at u0 with expm1 so that large k does not lose digits to
  // cancellation between terms of size k log k.
  const double u0 = slope > 0.0 ? std::log(slope) : 0.0;
  const double a = std::exp(u0);
  const double b = p.mu * std::exp(p.gamma * u0);
  const double base = c + slope * u0 - a - b;
  auto log_integrand = [&](double t) {
    return slope * t - a * std::expm1(t) - b * std::expm1(p.gamma * t);
  };
  // The mode solves slope = a e^t + b gamma e^{gamma t}; damped Newton is
  // enough because the log-integrand is strictly concave.
  double t = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double e1 = a * std::exp(t);
    const double e2 = b * std::exp(p.gamma * t);
    const double d1 = slope - e1 - p.gamma * e2;
    const double d2 = -e1 - p.gamma * p.gamma * e2;
    const double step = std::clamp(-d1 / d2, -2.0, 2.0);
    t += step;
    if (std::fabs(step) < 1e-12) {
      return base + numerics::integrate_log_concave_from_mode(log_integrand, t,
                                                              log_integrand(t), 1e-11);
    }
  }
  return base + numerics::integrate_log_concave(log_integrand, 0.0, 1e-11);
}

double gnb_pmf(std::uint64_t k, const GGParams& p) { return std::exp(gnb_log_pmf(k, p)); }

std::uint64_t gnb_truncation_point(const GGParams& p, double tail_mass, std::uint64_t cap) {
  p.validate();
  // P(N >= K) <= P(Lambda > K/2) + P(Poisson(K/2) >= K)
  //           <= gg_sf(K/2) + exp(-K (ln 2 - 1/2)).
  auto bound = [&](std::uint64_t k) {
    const double kk = static_cast<double>(k);
    return gg_sf(kk / 2.0, p) + std::exp(-kk * (std::numbers::ln2 - 0.5));
  };
  if (bound(cap) >= tail_mass) return cap;
  std::uint64_t lo = 0, hi = 1;
  while (hi < cap && bound(hi) >= tail_mass) {
    lo = hi;
    hi = std::min(cap, hi * 2);
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (bound(mid) < tail_mass ? hi : lo) = mid;
  }
  return hi;
}

std::uint64_t gnb_sample(const GGParams& p, Rng& rng) { return poisson_sample(gg_sample(p, rng), rng); }

}  // namespace precip

#pragma once

// Quadrature and root-finding helpers shared by the distribution modules.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "precip/errors.hpp"

namespace precip::numerics {

namespace detail {

template <class F>
double eval(F& f, double x) {
  const double v = f(x);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

}  // namespace detail

// Same integral when the mode of log_f and its value are already known.
template <class LogF>
double integrate_log_concave_from_mode(LogF&& log_f, double mode, double peak,
                                       double rel_tol = 1e-11) {
  constexpr double kDrop = 45.0;
  // Curvature-based scale for the range search.
  const double d = 1e-3;
  const double curv = (detail::eval(log_f, mode + d) - 2.0 * peak +
                       detail::eval(log_f, mode - d)) / (d * d);
  double sigma = curv < 0.0 ? 1.0 / std::sqrt(-curv) : 1.0;
  sigma = std::clamp(sigma, 1e-6, 1e3);

  auto edge = [&](double sign) {
    double s = sigma;
    for (int i = 0; i < 200; ++i) {
      double x = mode + sign * s;
      if (detail::eval(log_f, x) < peak - kDrop) return x;
      s *= 2.0;
    }
    throw QuadratureError("integrand tail does not decay");
  };
  const double lo = edge(-1.0);
  const double hi = edge(1.0);

  auto shifted = [&](double u) {
    const double v = detail::eval(log_f, u) - peak;
    return v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v);
  };
  // Trapezoid sums converge geometrically for smooth integrands that are
  // negligible at both ends; halve the step until two levels agree.
  double h = sigma / 2.0;
  for (int level = 0; level < 12; ++level, h /= 2.0) {
    const int n = static_cast<int>(std::ceil((hi - lo) / h));
    if (n > (1 << 20)) break;
    double fine = 0.0, even = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double v = shifted(lo + i * h);
      fine += v;
      if (i % 2 == 0) even += v;
    }
    fine *= h;
    const double coarse = even * 2.0 * h;
    if (fine > 0.0 && std::fabs(fine - coarse) < std::sqrt(rel_tol) * fine) {
      return peak + std::log(fine);
    }
  }
  throw QuadratureError("log-concave quadrature did not converge");
}

// Natural log of  ∫ exp(log_f(u)) du  over the real line, for a concave
// log_f. The integrand is re-centred at its mode, the integration range is
// cut where log_f drops 45 nats below the peak, and the rest is summed by
// the trapezoid rule with step halving.
template <class LogF>
double integrate_log_concave(LogF&& log_f, double guess = 0.0,
                             double rel_tol = 1e-11) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Bracket the mode by walking uphill with a doubling step.
  double x = guess;
  double fx = detail::eval(log_f, x);
  for (double s = 1.0; fx == kNegInf; s *= 2.0) {
    if (s > 1e6) throw QuadratureError("integrand vanishes everywhere");
    if ((fx = detail::eval(log_f, guess + s)) != kNegInf) {
      x = guess + s;
    } else if ((fx = detail::eval(log_f, guess - s)) != kNegInf) {
      x = guess - s;
    }
  }
  double a, b;
  double step = 1.0;
  const double fr = detail::eval(log_f, x + step);
  const double fl = detail::eval(log_f, x - step);
  if (fl <= fx && fr <= fx) {
    a = x - step;
    b = x + step;
  } else {
    const double dir = fr > fl ? 1.0 : -1.0;
    double prev = x;
    double cur = x + dir * step;
    double fcur = std::max(fr, fl);
    for (int i = 0;; ++i) {
      if (i > 200) throw QuadratureError("integrand mode not bracketed");
      step *= 2.0;
      const double next = cur + dir * step;
      const double fnext = detail::eval(log_f, next);
      if (fnext <= fcur) {
        a = std::min(prev, next);
        b = std::max(prev, next);
        break;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
    }
  }

  // Golden-section search for the mode.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = detail::eval(log_f, c);
  double fd = detail::eval(log_f, d);
  while (b - a > 1e-7 * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = detail::eval(log_f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = detail::eval(log_f, d);
    }
  }
  const double mode = fc > fd ? c : d;
  const double peak = std::max(fc, fd);
  if (!std::isfinite(peak)) throw QuadratureError("non-finite integrand peak");

  return integrate_log_concave_from_mode(log_f, mode, peak, rel_tol);
}

// Root of a monotone f on [lo, hi] with f(lo), f(hi) of opposite signs.
template <class F>
double find_root(F&& f, double lo, double hi, double abs_tol = 1e-14) {
  std::uintmax_t iters = 300;
  auto tol = [abs_tol](double x, double y) {
    return std::fabs(x - y) <= abs_tol * std::max(1.0, std::min(std::fabs(x), std::fabs(y)));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Root of an increasing f on (0, inf), bracketed by walking in log x from
// x_guess.
template <class F>
double solve_increasing(F&& f, double x_guess = 1.0) {
  auto g = [&](double t) { return f(std::exp(t)); };
  double t0 = std::log(x_guess > 0.0 && std::isfinite(x_guess) ? x_guess : 1.0);
  double g0 = g(t0);
  if (g0 == 0.0) return std::exp(t0);
  const double dir = g0 < 0.0 ? 1.0 : -1.0;
  double step = 1.0;
  double t1 = t0;
  double g1 = g0;
  for (int i = 0;; ++i) {
    if (i > 60) throw NumericalError("root not bracketed");
    t0 = t1;
    g0 = g1;
    t1 = t0 + dir * step;
    g1 = g(t1);
    if ((g1 > 0.0) != (g0 > 0.0) || g1 == 0.0) break;
    step *= 2.0;
  }
  if (g1 == 0.0) return std::exp(t1);
  return std::exp(find_root(g, std::min(t0, t1), std::max(t0, t1)));
}

// Solves cdf(x) = q for x > 0.
template <class Cdf>
double invert_cdf(Cdf&& cdf, double q, double x_guess = 1.0) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return solve_increasing([&](double x) { return cdf(x) - q; }, x_guess);
}

}  // namespace precip::numerics

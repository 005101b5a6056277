#include "precip/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "precip/errors.hpp"

namespace precip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

double safe_eval(const Objective& f, const std::vector<double>& x, int& evals) {
  ++evals;
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options) {
  if (start.empty()) throw DomainError("nelder_mead: empty start vector");
  const std::size_t n = start.size();
  NelderMeadResult result;
  int evals = 0;

  std::vector<double> best = std::move(start);
  double best_value = safe_eval(f, best, evals);

  for (int round = 0; round <= options.restarts; ++round) {
    Simplex s;
    s.points.push_back(best);
    s.values.push_back(best_value);
    for (std::size_t i = 0; i < n; ++i) {
      auto p = best;
      p[i] += options.initial_step;
      s.values.push_back(safe_eval(f, p, evals));
      s.points.push_back(std::move(p));
    }

    std::vector<std::size_t> order(n + 1);
    bool converged = false;
    while (evals < options.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];

      double diameter = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          diameter = std::max(diameter, std::fabs(s.points[i][j] - s.points[lo][j]));
        }
      }
      const double spread = s.values[hi] - s.values[lo];
      if ((std::isfinite(s.values[hi]) && spread <= options.f_tol) || diameter <= options.x_tol) {
        converged = std::isfinite(s.values[lo]);
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == hi) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += s.points[i][j] / static_cast<double>(n);
      }
      auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (s.points[hi][j] - centroid[j]);
        return p;
      };

      auto reflected = along(-1.0);
      const double fr = safe_eval(f, reflected, evals);
      if (fr < s.values[lo]) {
        auto expanded = along(-2.0);
        const double fe = safe_eval(f, expanded, evals);
        if (fe < fr) {
          s.points[hi] = std::move(expanded);
          s.values[hi] = fe;
        } else {
          s.points[hi] = std::move(reflected);
          s.values[hi] = fr;
        }
        continue;
      }
      if (fr < s.values[second]) {
        s.points[hi] = std::move(reflected);
        s.values[hi] = fr;
        continue;
      }
      const bool outside = fr < s.values[hi];
      auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = safe_eval(f, contracted, evals);
      if (fc < std::min(fr, s.values[hi])) {
        s.points[hi] = std::move(contracted);
        s.values[hi] = fc;
        continue;
      }
      // Shrink towards the best vertex.
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == lo) continue;
        for (std::size_t j = 0; j < n; ++j) {
          s.points[i][j] = s.points[lo][j] + 0.5 * (s.points[i][j] - s.points[lo][j]);
        }
        s.values[i] = safe_eval(f, s.points[i], evals);
      }
    }

    const auto it = std::min_element(s.values.begin(), s.values.end());
    const std::size_t idx = static_cast<std::size_t>(it - s.values.begin());
    if (s.values[idx] <= best_value) {
      best_value = s.values[idx];
      best = s.points[idx];
    }
    result.converged = converged;
    if (evals >= options.max_evaluations) break;
  }

  result.x = std::move(best);
  result.value = best_value;
  result.evaluations = evals;
  return result;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  if (!(lo < hi)) throw DomainError("golden_section_minimize: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol * (1.0 + std::fabs(lo) + std::fabs(hi))) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace precip

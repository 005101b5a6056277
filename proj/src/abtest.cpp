#include "precip/abtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "precip/errors.hpp"
#include "precip/optimize.hpp"

namespace precip {

namespace {

void check_volumes(std::span<const double> v) {
  if (v.size() < 2) throw DomainError("window must contain at least two volumes");
  for (const double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("volumes must be positive and finite");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
}

// Scaled by the largest value so that large gamma does not overflow.
double statistic_unchecked(std::span<const double> v, std::size_t tested, double gamma, double scale) {
  double rest = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j != tested) rest += std::pow(v[j] / scale, gamma);
  }
  return static_cast<double>(v.size() - 1) * std::pow(v[tested] / scale, gamma) / rest;
}

}  // namespace

void to_json(nlohmann::json& j, const TestDecision& d) {
  j = nlohmann::json{{"statistic", d.statistic}, {"critical_value", d.critical_value},
                     {"alpha", d.alpha_level},   {"reject", d.reject},
                     {"d1", d.d1},               {"d2", d.d2},
                     {"tested_index", d.tested_index}};
}

std::size_t window_argmax(std::span<const double> volumes) {
  if (volumes.empty()) throw DomainError("window_argmax: empty window");
  return static_cast<std::size_t>(std::max_element(volumes.begin(), volumes.end()) - volumes.begin());
}

double sr_statistic(std::span<const double> volumes, double gamma) {
  check_volumes(volumes);
  check_gamma(gamma);
  const std::size_t i = window_argmax(volumes);
  return statistic_unchecked(volumes, i, gamma, volumes[i]);
}

double sr_statistic_at(std::span<const double> volumes, std::size_t tested, double gamma) {
  check_volumes(volumes);
  check_gamma(gamma);
  if (tested >= volumes.size()) throw DomainError("sr_statistic_at: index out of range");
  return statistic_unchecked(volumes, tested, gamma, volumes[window_argmax(volumes)]);
}

double sr_critical_value(std::size_t m, double r, double alpha_level) {
  if (m < 2) throw DomainError("window size must be at least 2");
  if (!(r > 0.0)) throw DomainError("r must be positive");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw DomainError("alpha level must lie in (0, 1)");
  return sf_quantile(1.0 - alpha_level, r, static_cast<double>(m - 1) * r);
}

TestDecision test_abnormal_at(std::span<const double> volumes, std::size_t tested, double r, double gamma,
                              double alpha_level) {
  TestDecision d;
  d.statistic = sr_statistic_at(volumes, tested, gamma);
  d.critical_value = sr_critical_value(volumes.size(), r, alpha_level);
  d.alpha_level = alpha_level;
  d.reject = d.statistic > d.critical_value;
  d.d1 = r;
  d.d2 = static_cast<double>(volumes.size() - 1) * r;
  d.tested_index = tested;
  return d;
}

TestDecision test_abnormal(std::span<const double> volumes, double r, double gamma, double alpha_level) {
  check_volumes(volumes);
  return test_abnormal_at(volumes, window_argmax(volumes), r, gamma, alpha_level);
}

std::string to_string(ExtremityClass c) {
  switch (c) {
    case ExtremityClass::Absolute: return "absolute";
    case ExtremityClass::Intermediate: return "intermediate";
    case ExtremityClass::Relative: return "relative";
    case ExtremityClass::NotExtreme: return "none";
  }
  return "none";
}

ExtremityClass extremity_from_string(const std::string& s) {
  for (auto c : {ExtremityClass::Absolute, ExtremityClass::Intermediate, ExtremityClass::Relative,
                 ExtremityClass::NotExtreme}) {
    if (to_string(c) == s) return c;
  }
  throw DomainError("unknown extremity class '" + s + "'");
}

ScanResult moving_window_classify(std::span<const double> volumes, std::size_t window_m, double r, double gamma,
                                  double alpha_level, unsigned workers) {
  if (window_m < 2) throw DomainError("moving_window_classify: window must be at least 2");
  if (volumes.size() < window_m) throw DomainError("moving_window_classify: series shorter than window");
  for (const double x : volumes) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("volumes must be positive and finite");
  }
  check_gamma(gamma);
  const double critical = sr_critical_value(window_m, r, alpha_level);
  const std::size_t n = volumes.size();
  const std::size_t n_windows = n - window_m + 1;

  // Each window writes only its own slot, so the split is irrelevant to the result.
  std::vector<std::optional<std::size_t>> voted(n_windows);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto w = volumes.subspan(s, window_m);
      const std::size_t i = window_argmax(w);
      if (statistic_unchecked(w, i, gamma, w[i]) > critical) voted[s] = s + i;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_windows));
  if (workers <= 1) {
    run(0, n_windows);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_windows + workers - 1) / workers;
    for (std::size_t b = 0; b < n_windows; b += chunk) pool.emplace_back(run, b, std::min(n_windows, b + chunk));
    for (auto& t : pool) t.join();
  }

  ScanResult out;
  out.votes.assign(n, 0);
  out.windows_containing.resize(n);
  out.classes.resize(n);
  for (const auto& v : voted) {
    if (v) ++out.votes[*v];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = i + 1 >= window_m ? i + 1 - window_m : 0;
    const std::size_t last = std::min(i, n - window_m);
    const std::size_t w = last - first + 1;
    const std::size_t c = out.votes[i];
    out.windows_containing[i] = w;
    if (c == w) {
      out.classes[i] = ExtremityClass::Absolute;
    } else if (2 * c > w) {
      out.classes[i] = ExtremityClass::Intermediate;
    } else if (c >= 1) {
      out.classes[i] = ExtremityClass::Relative;
    } else {
      out.classes[i] = ExtremityClass::NotExtreme;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const GGFit& f) {
  j = nlohmann::json{{"r", f.params.r}, {"gamma", f.params.gamma}, {"mu", f.params.mu},
                     {"log_likelihood", f.log_likelihood}};
}

GGFit fit_gg_mle(std::span<const double> x) {
  if (x.size() < 3) throw DomainError("fit_gg_mle: need at least three observations");
  double max_x = 0.0;
  for (const double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("fit_gg_mle: observations must be positive and finite");
    max_x = std::max(max_x, v);
  }
  // Work on x / max_x; mu is rescaled afterwards (mu_x = mu_y / max_x^gamma).
  const double n = static_cast<double>(x.size());
  std::vector<double> logy(x.size());
  double sum_logy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    logy[i] = std::log(x[i] / max_x);
    sum_logy += logy[i];
  }
  auto profile = [&](double r, double g, double* mu_out) {
    double s = 0.0;
    for (const double ly : logy) s += std::exp(g * ly);
    const double mu = r * n / s;
    if (mu_out) *mu_out = mu;
    return n * std::log(g) + n * r * std::log(mu) - n * std::lgamma(r) + (g * r - 1.0) * sum_logy - r * n;
  };
  auto objective = [&](std::span<const double> t) {
    if (!(std::fabs(t[0]) < 20.0 && std::fabs(t[1]) < 20.0)) return std::numeric_limits<double>::infinity();
    return -profile(std::exp(t[0]), std::exp(t[1]), nullptr);
  };
  NelderMeadOptions opts;
  opts.f_tol = 1e-10;
  opts.x_tol = 1e-9;
  opts.initial_step = 0.3;
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (double r0 : {0.5, 1.0, 3.0}) {
    const auto res = nelder_mead(objective, {std::log(r0), 0.0}, opts);
    if (res.value < best.value) best = res;
  }
  if (!std::isfinite(best.value)) throw OptimizerError("fit_gg_mle: likelihood could not be maximized");
  GGFit fit;
  fit.params.r = std::exp(best.x[0]);
  fit.params.gamma = std::exp(best.x[1]);
  double mu_y = 0.0;
  profile(fit.params.r, fit.params.gamma, &mu_y);
  fit.params.mu = mu_y * std::pow(max_x, -fit.params.gamma);
  // log-likelihood on the original scale differs by the Jacobian -n log(max_x)
  fit.log_likelihood = -best.value - n * std::log(max_x);
  return fit;
}

}  // namespace precip

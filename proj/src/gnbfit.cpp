#include "precip/gnbfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "precip/errors.hpp"
#include "precip/optimize.hpp"
#include "precip/special.hpp"

namespace precip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double shifted_mean(const DurationHistogram& h) {
  double s = 0.0;
  for (const auto& [k, c] : h.counts) s += static_cast<double>(k - 1) * static_cast<double>(c);
  return s / static_cast<double>(h.total);
}

void require_histogram(const DurationHistogram& h) {
  if (h.total == 0 || h.counts.empty()) throw DomainError("empty duration histogram");
  if (h.counts.begin()->first < 1) throw DomainError("durations must be at least one day");
}

// mu that makes the GNB mean equal to `mean` for the given r and gamma.
double mean_matched_mu(double r, double gamma, double mean) {
  return std::exp(gamma * (std::lgamma(r + 1.0 / gamma) - std::lgamma(r) - std::log(mean)));
}

int free_parameter_count(const GnbFitOptions& o) {
  return 1 + (o.fixed_r ? 0 : 1) + (o.fixed_gamma ? 0 : 1);
}

}  // namespace

double DurationHistogram::frequency(std::uint64_t duration) const {
  if (total == 0) return 0.0;
  const auto it = counts.find(duration);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

std::uint64_t DurationHistogram::max_duration() const {
  return counts.empty() ? 0 : counts.rbegin()->first;
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::L1: return "l1";
    case Metric::L2: return "l2";
    case Metric::Linf: return "linf";
  }
  return "l1";
}

Metric metric_from_string(const std::string& s) {
  if (s == "l1") return Metric::L1;
  if (s == "l2") return Metric::L2;
  if (s == "linf") return Metric::Linf;
  throw DomainError("unknown metric '" + s + "' (expected l1, l2 or linf)");
}

void to_json(nlohmann::json& j, const FitResult& f) {
  j = nlohmann::json{{"r", f.params.r},
                     {"gamma", f.params.gamma},
                     {"mu", f.params.mu},
                     {"metric", to_string(f.metric)},
                     {"distance", f.distance},
                     {"pvalue", f.chi_square_pvalue}};
  if (f.fixed_r) j["fixed_r"] = *f.fixed_r;
}

void from_json(const nlohmann::json& j, FitResult& f) {
  f.params.r = j.at("r").get<double>();
  f.params.gamma = j.at("gamma").get<double>();
  f.params.mu = j.at("mu").get<double>();
  f.metric = metric_from_string(j.at("metric").get<std::string>());
  f.distance = j.at("distance").get<double>();
  f.chi_square_pvalue = j.at("pvalue").is_null() ? std::nan("") : j.at("pvalue").get<double>();
  if (j.contains("fixed_r")) f.fixed_r = j.at("fixed_r").get<double>();
}

DurationHistogram build_histogram(std::span<const std::uint64_t> durations) {
  if (durations.empty()) throw DomainError("build_histogram: no durations");
  DurationHistogram h;
  for (const auto d : durations) {
    if (d < 1) throw DomainError("build_histogram: durations must be at least one day");
    ++h.counts[d];
    ++h.total;
  }
  return h;
}

std::vector<double> shifted_gnb_probabilities(const DurationHistogram& h, const GGParams& p,
                                              std::uint64_t cap) {
  const std::uint64_t k_hist = h.max_duration();
  if (cap == 0) cap = 4 * k_hist + 200;
  const std::uint64_t k_trunc = gnb_truncation_point(p, 1e-10, cap) + 1;
  const std::uint64_t k_max = std::max(k_hist, std::min(k_trunc, cap));
  std::vector<double> probs(k_max);
  for (std::uint64_t k = 1; k <= k_max; ++k) probs[k - 1] = gnb_pmf(k - 1, p);
  return probs;
}

double lp_distance(const DurationHistogram& h, const GGParams& p, Metric metric) {
  require_histogram(h);
  const auto probs = shifted_gnb_probabilities(h, p);
  double l1 = 0.0, l2 = 0.0, linf = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = std::fabs(h.frequency(i + 1) - probs[i]);
    l1 += d;
    l2 += d * d;
    linf = std::max(linf, d);
    mass += probs[i];
  }
  // Model mass beyond the truncation range counts towards l1 exactly.
  l1 += std::max(0.0, 1.0 - mass);
  switch (metric) {
    case Metric::L1: return l1;
    case Metric::L2: return std::sqrt(l2);
    case Metric::Linf: return linf;
  }
  return l1;
}

FitResult fit_nb(std::span<const std::uint64_t> durations, NbMethod method) {
  return fit_nb(build_histogram(durations), method);
}

FitResult fit_nb(const DurationHistogram& h, NbMethod method) {
  require_histogram(h);
  const double n = static_cast<double>(h.total);
  const double mean = shifted_mean(h);
  if (!(mean > 0.0)) {
    throw OptimizerError("fit_nb: every duration equals one day, the NB scale is unbounded (mean of shifted counts = 0)");
  }
  double r = 0.0;
  if (method == NbMethod::Moments) {
    double ss = 0.0;
    for (const auto& [k, c] : h.counts) {
      const double d = static_cast<double>(k - 1) - mean;
      ss += d * d * static_cast<double>(c);
    }
    const double var = ss / n;
    if (!(var > mean)) {
      throw OptimizerError("fit_nb: moment matching needs overdispersion (variance " + std::to_string(var) +
                           " <= mean " + std::to_string(mean) + ")");
    }
    r = mean * mean / (var - mean);
  } else {
    // Profile likelihood in r with the scale at its conditional optimum
    // mu = r / mean.
    const double total_count = mean * n;
    auto neg_loglik = [&](double log_r) {
      const double rr = std::exp(log_r);
      double ll = 0.0;
      const double lg_r = std::lgamma(rr);
      for (const auto& [k, c] : h.counts) {
        ll += static_cast<double>(c) * (std::lgamma(rr + static_cast<double>(k - 1)) - lg_r);
      }
      ll += n * rr * std::log(rr / (rr + mean)) + total_count * std::log(mean / (rr + mean));
      return -ll;
    };
    r = std::exp(golden_section_minimize(neg_loglik, std::log(1e-4), std::log(1e4), 1e-12));
    if (!std::isfinite(r)) throw OptimizerError("fit_nb: likelihood maximization failed");
  }
  FitResult out;
  out.params = GGParams{r, 1.0, r / mean};
  out.metric = Metric::L1;
  out.distance = lp_distance(h, out.params, Metric::L1);
  try {
    out.chi_square_pvalue = chi_square_gof(h, out.params, 2);
  } catch (const DataError&) {
    out.chi_square_pvalue = std::nan("");
  }
  return out;
}

FitResult fit_gnb(const DurationHistogram& h, const GnbFitOptions& options) {
  require_histogram(h);
  if (options.fixed_r && !(*options.fixed_r > 0.0)) throw DomainError("fit_gnb: fixed r must be positive");
  if (options.fixed_gamma && !(*options.fixed_gamma > 0.0)) throw DomainError("fit_gnb: fixed gamma must be positive");
  const double mean = shifted_mean(h);
  if (!(mean > 0.0)) throw OptimizerError("fit_gnb: every duration equals one day, the scale is unbounded");

  auto unpack = [&](std::span<const double> x) {
    GGParams p;
    std::size_t i = 0;
    p.r = options.fixed_r ? *options.fixed_r : std::exp(x[i++]);
    p.gamma = options.fixed_gamma ? *options.fixed_gamma : std::exp(x[i++]);
    p.mu = std::exp(x[i++]);
    return p;
  };
  auto pack = [&](const GGParams& p) {
    std::vector<double> x;
    if (!options.fixed_r) x.push_back(std::log(p.r));
    if (!options.fixed_gamma) x.push_back(std::log(p.gamma));
    x.push_back(std::log(p.mu));
    return x;
  };
  auto objective = [&](std::span<const double> x) {
    for (const double v : x) {
      if (!(std::fabs(v) < 25.0)) return kInf;
    }
    try {
      return lp_distance(h, unpack(x), options.metric);
    } catch (const NumericalError&) {
      return kInf;
    } catch (const DomainError&) {
      return kInf;
    }
  };

  // Deterministic grid of starts in log-parameter space, each with mu chosen
  // to reproduce the sample mean.
  std::vector<GGParams> starts;
  const double grid_gamma[] = {0.5, 0.8, 1.25, 2.0};
  auto add_start = [&](double r, double gamma, double shift) {
    starts.push_back(GGParams{r, gamma, mean_matched_mu(r, gamma, mean) * std::exp(shift)});
  };
  if (options.fixed_gamma && options.fixed_r) {
    for (double s : {-1.0, -0.6, -0.3, -0.1, 0.1, 0.3, 0.6, 1.0}) add_start(*options.fixed_r, *options.fixed_gamma, s);
  } else if (options.fixed_gamma) {
    for (double r : {0.25, 0.5, 1.0, 2.0}) {
      for (double s : {-0.35, 0.35}) add_start(r, *options.fixed_gamma, s);
    }
  } else if (options.fixed_r) {
    for (double g : grid_gamma) {
      for (double s : {-0.35, 0.35}) add_start(*options.fixed_r, g, s);
    }
  } else {
    for (double r : {0.5, 1.0}) {
      for (double g : grid_gamma) add_start(r, g, 0.0);
    }
  }
  add_start(options.fixed_r.value_or(1.0), options.fixed_gamma.value_or(1.0), 0.0);
  for (GGParams p : options.extra_starts) {
    if (options.fixed_r) p.r = *options.fixed_r;
    if (options.fixed_gamma) p.gamma = *options.fixed_gamma;
    starts.push_back(p);
  }

  NelderMeadOptions nm;
  nm.f_tol = 1e-8;
  nm.x_tol = 1e-7;
  nm.initial_step = 0.2;
  nm.max_evaluations = 3000;
  nm.restarts = 1;

  std::vector<double> best_x;
  double best_value = kInf;
  for (const auto& s : starts) {
    const auto res = nelder_mead(objective, pack(s), nm);
    if (res.value < best_value) {
      best_value = res.value;
      best_x = res.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw OptimizerError("fit_gnb: no start produced a finite " + to_string(options.metric) + " distance (" +
                         std::to_string(starts.size()) + " starts, histogram total " + std::to_string(h.total) + ")");
  }

  FitResult out;
  out.params = unpack(best_x);
  out.metric = options.metric;
  out.distance = best_value;
  out.fixed_r = options.fixed_r;
  try {
    out.chi_square_pvalue = chi_square_gof(h, out.params, free_parameter_count(options));
  } catch (const DataError&) {
    out.chi_square_pvalue = std::nan("");
  }
  return out;
}

ChiSquareResult pearson_chi_square(std::span<const double> observed, std::span<const double> expected,
                                   int fitted_params) {
  if (observed.size() != expected.size()) throw DomainError("pearson_chi_square: size mismatch");
  std::vector<double> obs_cells, exp_cells;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= 5.0) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
    } else {
      obs_cells.back() += o;
      exp_cells.back() += e;
    }
  }
  ChiSquareResult res;
  res.cells = static_cast<int>(obs_cells.size());
  if (res.cells < 2) throw DataError("chi-square test: fewer than 2 cells after pooling to expected counts >= 5");
  res.degrees_of_freedom = res.cells - 1 - fitted_params;
  if (res.degrees_of_freedom < 1) {
    throw DataError("chi-square test: " + std::to_string(res.cells) + " pooled cells leave no degrees of freedom for " +
                    std::to_string(fitted_params) + " fitted parameters");
  }
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    const double d = obs_cells[i] - exp_cells[i];
    res.statistic += d * d / exp_cells[i];
  }
  res.pvalue = reg_inc_gamma_upper(0.5 * res.degrees_of_freedom, 0.5 * res.statistic);
  return res;
}

ChiSquareResult chi_square_test(const DurationHistogram& h, const GGParams& p, int fitted_params) {
  require_histogram(h);
  const auto probs = shifted_gnb_probabilities(h, p, 4 * h.max_duration() + 200);
  const double n = static_cast<double>(h.total);
  std::vector<double> observed(probs.size() + 1, 0.0), expected(probs.size() + 1, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto it = h.counts.find(i + 1);
    observed[i] = it == h.counts.end() ? 0.0 : static_cast<double>(it->second);
    expected[i] = n * probs[i];
    mass += probs[i];
  }
  // Open tail cell beyond the computed range.
  expected.back() = n * std::max(0.0, 1.0 - mass);
  return pearson_chi_square(observed, expected, fitted_params);
}

double chi_square_gof(const DurationHistogram& h, const GGParams& p, int fitted_params) {
  return chi_square_test(h, p, fitted_params).pvalue;
}

}  // namespace precip

// precip-glaw command line front end.
//
// Exit codes: 0 ok, 2 usage or invalid arguments, 3 input data rejected,
// 4 numerical failure. Failures print a JSON object on stderr.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "precip/abtest.hpp"
#include "precip/csv.hpp"
#include "precip/distributions.hpp"
#include "precip/errors.hpp"
#include "precip/extremes.hpp"
#include "precip/gnbfit.hpp"
#include "precip/pipeline.hpp"
#include "precip/trend.hpp"

using namespace precip;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kNumerical = 4;

struct InputOptions {
  std::string input;
  std::string config;
  double threshold = 0.0;
  std::optional<std::string> delimiter;
  std::optional<std::string> missing_token;
  std::optional<std::string> missing_policy;
};

void add_input_options(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("--input", o.input, "daily CSV (date, precipitation mm)")->required();
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--threshold", o.threshold, "wet-day threshold in mm (wet means strictly above)");
  cmd->add_option("--delimiter", o.delimiter, "column delimiter");
  cmd->add_option("--missing-token", o.missing_token, "token marking a missing value");
  cmd->add_option("--missing-policy", o.missing_policy, "reject or split")->check(CLI::IsMember({"reject", "split"}));
}

struct Loaded {
  DailySeries series;
  std::vector<WetPeriod> periods;
};

Loaded load(const InputOptions& o, CLI::App* cmd) {
  json cfg = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw DataError("cannot open config file '" + o.config + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("config file is not valid JSON: ") + e.what());
    }
  }
  if (o.delimiter) cfg["delimiter"] = *o.delimiter;
  if (o.missing_token) cfg["missing_token"] = *o.missing_token;
  if (o.missing_policy) cfg["missing_policy"] = *o.missing_policy;
  const auto csv = cfg.get<CsvConfig>();
  double threshold = o.threshold;
  if (cfg.contains("wet_threshold_mm") && cmd->count("--threshold") == 0) {
    threshold = cfg.at("wet_threshold_mm").get<double>();
  }
  Loaded l;
  l.series = parse_daily_csv(o.input, csv);
  l.periods = segment_wet_periods(l.series, threshold);
  return l;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("not a number in parameter list: '" + item + "'");
    }
  }
  return out;
}

GGParams gg_params(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() != 3) throw DomainError("--params needs r,gamma,mu");
  GGParams p{v[0], v[1], v[2]};
  p.validate();
  return p;
}

ExtremeParams extreme_params(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() != 4) throw DomainError("--params needs r,alpha,gamma,lambda");
  ExtremeParams p{v[0], v[1], v[2], v[3]};
  p.validate();
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

void write_table(const std::string& path, const CsvTable& t) {
  std::ostringstream ss;
  write_csv(ss, t);
  write_text(path, ss.str());
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// ---- fit-duration ---------------------------------------------------------

struct FitDurationOptions {
  InputOptions in;
  std::optional<double> fixed_r;
  bool r_from_nb = false;
  std::string metric = "l1";
  std::string output;
  std::string csv;
};

void run_fit_duration(const FitDurationOptions& o, CLI::App* cmd) {
  const auto data = load(o.in, cmd);
  if (data.periods.empty()) throw DataError("no wet periods in the input");
  std::vector<std::uint64_t> durations;
  for (const auto& p : data.periods) durations.push_back(p.duration_days);
  const auto h = build_histogram(durations);

  auto nb = fit_nb(h);
  nb.chi_square_pvalue = chi_square_gof(h, nb.params, 2);

  GnbFitOptions opts;
  opts.metric = metric_from_string(o.metric);
  if (o.fixed_r) opts.fixed_r = *o.fixed_r;
  if (o.r_from_nb) opts.fixed_r = nb.params.r;
  opts.extra_starts.push_back(nb.params);
  auto gnb = fit_gnb(h, opts);
  try {
    gnb.chi_square_pvalue = chi_square_gof(h, gnb.params, opts.fixed_r ? 2 : 3);
  } catch (const DataError&) {
    // too few pooled cells: p-value stays null
  }

  json out{{"wet_periods", h.total}, {"gnb", gnb}, {"nb", nb}};
  write_json(o.output, out);

  if (!o.csv.empty()) {
    CsvTable t;
    t.columns = {"duration", "count", "frequency", "gnb_pmf", "nb_pmf"};
    const auto pg = shifted_gnb_probabilities(h, gnb.params, h.max_duration());
    const auto pn = shifted_gnb_probabilities(h, nb.params, h.max_duration());
    for (std::uint64_t k = 1; k <= h.max_duration(); ++k) {
      const auto it = h.counts.find(k);
      t.rows.push_back({std::to_string(k), std::to_string(it == h.counts.end() ? 0 : it->second),
                        format_number(h.frequency(k)), format_number(pg[k - 1]), format_number(pn[k - 1])});
    }
    write_table(o.csv, t);
  }
}

// ---- fit-volume / fit-maxima ---------------------------------------------

void run_fit_volume(const InputOptions& in, const std::string& output, CLI::App* cmd) {
  const auto data = load(in, cmd);
  std::vector<double> v;
  for (const auto& p : data.periods) v.push_back(p.total_volume_mm);
  json out = fit_gg_mle(v);
  out["wet_periods"] = v.size();
  write_json(output, out);
}

void run_fit_maxima(const InputOptions& in, const std::string& output, CLI::App* cmd) {
  const auto data = load(in, cmd);
  std::vector<double> v;
  for (const auto& p : data.periods) v.push_back(p.max_daily_mm);
  const auto fit = fit_extreme(v);
  json out{{"params", fit.params},
           {"hill_alpha", fit.hill_alpha},
           {"moment_residual", fit.moment_residual},
           {"cdf_l2", fit.cdf_l2},
           {"wet_periods", v.size()}};
  write_json(output, out);
}

// ---- trend ----------------------------------------------------------------

struct TrendOptions {
  InputOptions in;
  std::size_t m = 3000;
  std::optional<double> beta;
  std::string output;
  std::string csv;
};

void run_trend(const TrendOptions& o, CLI::App* cmd) {
  const auto data = load(o.in, cmd);
  std::vector<double> x;
  for (const double v : data.series.precip_mm) {
    if (v > 0.0) x.push_back(v);  // the growth law concerns nonzero daily volumes
  }
  const auto fit = estimate_trend(x, o.m);
  write_json(o.output, json(fit));
  if (!o.csv.empty()) {
    const auto s = cumulative_average_series(x, o.beta.value_or(fit.beta_hat));
    CsvTable t;
    t.columns = {"k", "value"};
    for (std::size_t k = 1; k <= s.size(); ++k) t.rows.push_back({std::to_string(k), format_number(s[k - 1])});
    write_table(o.csv, t);
  }
}

// ---- scan -----------------------------------------------------------------

struct ScanOptions {
  InputOptions in;
  std::size_t window = 360;
  double alpha = 0.01;
  std::optional<double> gamma;
  std::optional<double> r;
  bool classic = false;
  unsigned workers = 1;
  std::string output;
  std::string summary;
};

void run_scan(const ScanOptions& o, CLI::App* cmd) {
  const auto data = load(o.in, cmd);
  std::vector<double> v;
  for (const auto& p : data.periods) v.push_back(p.total_volume_mm);
  double r = 0.0, gamma = 0.0;
  json params;
  if (!o.r || (!o.gamma && !o.classic)) {
    const auto fit = fit_gg_mle(v);
    params["volume_fit"] = fit;
    r = fit.params.r;
    gamma = fit.params.gamma;
  }
  if (o.r) r = *o.r;
  if (o.gamma) gamma = *o.gamma;
  if (o.classic) gamma = 1.0;
  const auto res = moving_window_classify(v, o.window, r, gamma, o.alpha, o.workers);

  CsvTable t;
  t.columns = {"period_index", "start_date", "total_volume_mm", "class", "votes", "windows_containing"};
  std::size_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    t.rows.push_back({std::to_string(i), format_iso_date(data.series.dates[data.periods[i].start_index]),
                      format_number(v[i]), to_string(res.classes[i]), std::to_string(res.votes[i]),
                      std::to_string(res.windows_containing[i])});
    ++counts[static_cast<int>(res.classes[i])];
  }
  write_table(o.output, t);
  if (!o.summary.empty()) {
    params["r"] = r;
    params["gamma"] = gamma;
    params["window"] = o.window;
    params["alpha"] = o.alpha;
    params["critical_value"] = sr_critical_value(o.window, r, o.alpha);
    params["counts"] = {{"absolute", counts[0]}, {"intermediate", counts[1]}, {"relative", counts[2]},
                        {"none", counts[3]}};
    write_json(o.summary, params);
  }
}

// ---- dist -----------------------------------------------------------------

struct DistOptions {
  std::string family;
  std::string op;
  std::string params;
  std::vector<double> x;
  std::string output;
};

double gg_moment(double delta, const GGParams& p) {
  // E X^delta = Gamma(r + delta/gamma) / (Gamma(r) mu^(delta/gamma))
  const double s = delta / p.gamma;
  if (!(p.r + s > 0.0)) throw DomainError("moment of this order does not exist");
  return std::exp(std::lgamma(p.r + s) - std::lgamma(p.r) - s * std::log(p.mu));
}

double dist_value(const DistOptions& o, double x) {
  if (o.family == "gg") {
    const auto p = gg_params(o.params);
    if (o.op == "pdf") return gg_pdf(x, p);
    if (o.op == "cdf") return gg_cdf(x, p);
    if (o.op == "quantile") return gg_quantile(x, p);
    return gg_moment(x, p);
  }
  if (o.family == "gnb") {
    const auto p = gg_params(o.params);
    if (x < 0.0 || x != std::floor(x)) {
      if (o.op == "pdf" || o.op == "cdf") throw DomainError("gnb is defined on nonnegative integers");
    }
    if (o.op == "pdf") return gnb_pmf(static_cast<std::uint64_t>(x), p);
    if (o.op == "cdf") {
      double s = 0.0;
      for (std::uint64_t k = 0; k <= static_cast<std::uint64_t>(x); ++k) s += gnb_pmf(k, p);
      return std::min(1.0, s);
    }
    if (o.op == "quantile") {
      if (!(x > 0.0 && x < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
      double s = 0.0;
      const auto cap = gnb_truncation_point(p, 1e-12, 10000000);
      for (std::uint64_t k = 0; k <= cap; ++k) {
        s += gnb_pmf(k, p);
        if (s >= x) return static_cast<double>(k);
      }
      return static_cast<double>(cap);
    }
    throw DomainError("moment is not available for the gnb family");
  }
  const auto p = extreme_params(o.params);
  if (o.op == "pdf") return extreme_pdf(x, p);
  if (o.op == "cdf") return extreme_cdf(x, p);
  if (o.op == "quantile") return extreme_quantile(x, p);
  return extreme_moment(x, p);
}

void run_dist(const DistOptions& o) {
  if (o.x.size() == 1) {
    write_text(o.output, scalar(dist_value(o, o.x[0])) + "\n");
    return;
  }
  CsvTable t;
  t.columns = {"x", o.op};
  for (const double x : o.x) t.rows.push_back({format_number(x), format_number(dist_value(o, x))});
  write_table(o.output, t);
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string family;
  std::string params;
  std::string repr = "direct";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output;
};

void run_simulate(const SimulateOptions& o) {
  std::function<double(Rng&)> sampler;
  if (o.family == "gg") {
    const auto p = gg_params(o.params);
    sampler = [p](Rng& r) { return gg_sample(p, r); };
  } else if (o.family == "gnb") {
    const auto p = gg_params(o.params);
    sampler = [p](Rng& r) { return static_cast<double>(gnb_sample(p, r)); };
  } else {
    const auto p = extreme_params(o.params);
    const auto repr = representation_from_string(o.repr);
    const auto why = representation_violation(repr, p);
    if (!why.empty()) throw DomainError(why);
    sampler = [p, repr](Rng& r) { return extreme_sample(p, r, repr); };
  }
  // Fixed-size shards, each with its own stream: output does not depend on
  // the number of workers.
  constexpr std::size_t kShard = 1 << 14;
  std::vector<double> v(o.n);
  const std::size_t shards = (o.n + kShard - 1) / kShard;
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t s = first; s < shards; s += stride) {
      Rng rng = Rng::for_shard(o.seed, s);
      for (std::size_t i = s * kShard; i < std::min(o.n, (s + 1) * kShard); ++i) v[i] = sampler(rng);
    }
  };
  const unsigned workers = std::max(1u, o.workers == 0 ? std::thread::hardware_concurrency() : o.workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w, workers);
  work(0, workers);
  for (auto& t : pool) t.join();

  CsvTable t;
  t.columns = {"i", "value"};
  for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({std::to_string(i), format_number(v[i])});
  write_table(o.output, t);
}

int fail(int code, const std::string& kind, const std::string& message, std::optional<std::size_t> line = {}) {
  json e{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  if (line) e["error"]["line"] = *line;
  std::cerr << e.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wet-period precipitation statistics: GNB durations, GG volumes, extremes, trend and scan"};
  app.require_subcommand(1);

  FitDurationOptions fd;
  auto* c_fd = app.add_subcommand("fit-duration", "fit NB and GNB laws to wet-period durations");
  add_input_options(c_fd, fd.in);
  c_fd->add_option("--fixed-r", fd.fixed_r, "hold r fixed while fitting gamma and mu");
  c_fd->add_flag("--r-from-nb", fd.r_from_nb, "hold r at the NB maximum likelihood value");
  c_fd->add_option("--metric", fd.metric, "l1, l2 or linf")->check(CLI::IsMember({"l1", "l2", "linf"}));
  c_fd->add_option("--output", fd.output, "JSON result (default stdout)");
  c_fd->add_option("--csv", fd.csv, "histogram against fitted pmfs");
  c_fd->get_option("--fixed-r")->excludes(c_fd->get_option("--r-from-nb"));

  InputOptions fv;
  std::string fv_out;
  auto* c_fv = app.add_subcommand("fit-volume", "maximum likelihood GG fit of wet-period totals");
  add_input_options(c_fv, fv);
  c_fv->add_option("--output", fv_out, "JSON result (default stdout)");

  InputOptions fm;
  std::string fm_out;
  auto* c_fm = app.add_subcommand("fit-maxima", "fit the limit law of wet-period daily maxima");
  add_input_options(c_fm, fm);
  c_fm->add_option("--output", fm_out, "JSON result (default stdout)");

  TrendOptions tr;
  auto* c_tr = app.add_subcommand("trend", "power-law growth of cumulative precipitation");
  add_input_options(c_tr, tr.in);
  c_tr->add_option("--m", tr.m, "first index used in the regression")->check(CLI::PositiveNumber);
  c_tr->add_option("--beta", tr.beta, "exponent for the cumulative-average series (default: fitted)");
  c_tr->add_option("--output", tr.output, "JSON result (default stdout)");
  c_tr->add_option("--csv", tr.csv, "cumulative-average series");

  ScanOptions sc;
  auto* c_sc = app.add_subcommand("scan", "moving-window abnormality classification of wet-period totals");
  add_input_options(c_sc, sc.in);
  c_sc->add_option("--window", sc.window, "window size in wet periods")->check(CLI::Range(2, 1000000));
  c_sc->add_option("--alpha", sc.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  c_sc->add_option("--gamma", sc.gamma, "GG power (default: volume fit)");
  c_sc->add_option("--r", sc.r, "GG shape (default: volume fit)");
  c_sc->add_flag("--classic", sc.classic, "gamma = 1 (classical SR test)");
  c_sc->add_option("--workers", sc.workers, "threads (0 = all cores)");
  c_sc->add_option("--output", sc.output, "classification CSV (default stdout)");
  c_sc->add_option("--summary", sc.summary, "JSON summary of parameters and class counts");

  DistOptions di;
  auto* c_di = app.add_subcommand("dist", "evaluate pdf, cdf, quantile or moment");
  c_di->add_option("--family", di.family)->required()->check(CLI::IsMember({"gg", "gnb", "extreme"}));
  c_di->add_option("--op", di.op)->required()->check(CLI::IsMember({"pdf", "cdf", "quantile", "moment"}));
  c_di->add_option("--params", di.params, "r,gamma,mu or r,alpha,gamma,lambda")->required();
  c_di->add_option("--x", di.x, "argument(s): point, probability level or moment order")->required();
  c_di->add_option("--output", di.output, "default stdout");

  SimulateOptions si;
  auto* c_si = app.add_subcommand("simulate", "draw a sample");
  c_si->add_option("--family", si.family)->required()->check(CLI::IsMember({"gg", "gnb", "extreme"}));
  c_si->add_option("--params", si.params)->required();
  c_si->add_option("--repr", si.repr, "extreme-law sampler")
      ->check(CLI::IsMember({"direct", "ratio-weibull", "tempered-sf", "pareto-mix", "folded-normal"}));
  c_si->add_option("--n", si.n)->required();
  c_si->add_option("--seed", si.seed);
  c_si->add_option("--workers", si.workers, "threads (0 = all cores)");
  c_si->add_option("--output", si.output, "default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*c_fd) run_fit_duration(fd, c_fd);
    if (*c_fv) run_fit_volume(fv, fv_out, c_fv);
    if (*c_fm) run_fit_maxima(fm, fm_out, c_fm);
    if (*c_tr) run_trend(tr, c_tr);
    if (*c_sc) run_scan(sc, c_sc);
    if (*c_di) run_dist(di);
    if (*c_si) run_simulate(si);
  } catch (const ParseError& e) {
    return fail(kData, "data", e.what(), e.line());
  } catch (const DataError& e) {
    return fail(kData, "data", e.what());
  } catch (const DomainError& e) {
    return fail(kUsage, "domain", e.what());
  } catch (const NumericalError& e) {
    return fail(kNumerical, "numerical", e.what());
  } catch (const json::exception& e) {
    return fail(kData, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kNumerical, "internal", e.what());
  }
  return 0;
}

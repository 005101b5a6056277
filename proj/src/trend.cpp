#include "precip/trend.hpp"

#include <cmath>

#include "precip/errors.hpp"

namespace precip {

void to_json(nlohmann::json& j, const TrendFit& f) {
  j = nlohmann::json{{"a", f.a_hat}, {"beta", f.beta_hat}, {"m", f.m}, {"n", f.n}, {"sse", f.residual_sse}};
}

void from_json(const nlohmann::json& j, TrendFit& f) {
  f.a_hat = j.at("a").get<double>();
  f.beta_hat = j.at("beta").get<double>();
  f.m = j.at("m").get<std::size_t>();
  f.n = j.at("n").get<std::size_t>();
  f.residual_sse = j.at("sse").get<double>();
}

std::vector<double> cumulative_sums(std::span<const double> x) {
  if (x.empty()) throw DomainError("cumulative_sums: empty input");
  std::vector<double> t(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) throw DomainError("cumulative_sums: values must be nonnegative and finite");
    s += x[i];
    t[i] = s;
  }
  return t;
}

TrendFit estimate_trend(std::span<const double> x, std::size_t m) {
  if (m < 2) throw DomainError("estimate_trend: m must be at least 2");
  if (x.size() < m) throw DomainError("estimate_trend: series shorter than m");
  const auto t = cumulative_sums(x);
  const std::size_t n = x.size();

  // Centered sums keep the normal equations well conditioned for long series.
  const double count = static_cast<double>(n - m + 1);
  double mean_u = 0.0, mean_v = 0.0;
  for (std::size_t k = m; k <= n; ++k) {
    if (!(t[k - 1] > 0.0)) throw DomainError("estimate_trend: cumulative sum must be positive over k = m..n");
    mean_u += std::log(static_cast<double>(k));
    mean_v += std::log(t[k - 1]);
  }
  mean_u /= count;
  mean_v /= count;
  double suu = 0.0, suv = 0.0;
  for (std::size_t k = m; k <= n; ++k) {
    const double du = std::log(static_cast<double>(k)) - mean_u;
    suu += du * du;
    suv += du * (std::log(t[k - 1]) - mean_v);
  }

  TrendFit fit;
  fit.m = m;
  fit.n = n;
  if (suu == 0.0) {
    // single point (m == n): slope undetermined
    throw DomainError("estimate_trend: need at least two points (m < n)");
  }
  fit.beta_hat = suv / suu;
  const double log_a = mean_v - fit.beta_hat * mean_u;
  fit.a_hat = std::exp(log_a);
  double sse = 0.0;
  for (std::size_t k = m; k <= n; ++k) {
    const double e = std::log(t[k - 1]) - log_a - fit.beta_hat * std::log(static_cast<double>(k));
    sse += e * e;
  }
  fit.residual_sse = sse;
  return fit;
}

std::vector<double> cumulative_average_series(std::span<const double> x, double beta) {
  if (!(beta > 0.0)) throw DomainError("cumulative_average_series: beta must be positive");
  auto t = cumulative_sums(x);
  for (std::size_t k = 1; k <= t.size(); ++k) t[k - 1] /= std::pow(static_cast<double>(k), beta);
  return t;
}

}  // namespace precip

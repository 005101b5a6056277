#pragma once

// Power-law growth of cumulative precipitation: T_k = X_1 + ... + X_k is
// modelled as a * k^beta, and (a, beta) come from ordinary least squares of
// log T_k on log k over k = m..n.

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace precip {

struct TrendFit {
  double a_hat = 0.0;
  double beta_hat = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  double residual_sse = 0.0;
};

void to_json(nlohmann::json& j, const TrendFit& f);
void from_json(const nlohmann::json& j, TrendFit& f);

std::vector<double> cumulative_sums(std::span<const double> x);

// m is 1-based: the regression uses k = m..n. Needs n >= m >= 2.
TrendFit estimate_trend(std::span<const double> x, std::size_t m);

// T_k / k^beta for k = 1..n.
std::vector<double> cumulative_average_series(std::span<const double> x, double beta);

}  // namespace precip

#pragma once

// Abnormality test for the largest total volume in a window of m wet periods:
//   SR = (m-1) V_max^gamma / sum_{j != max} V_j^gamma,
// compared with the (1-alpha) quantile of the Snedecor-Fisher law with
// shape parameters r and (m-1) r. gamma = 1 gives the classical SR test.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "precip/distributions.hpp"

namespace precip {

struct TestDecision {
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha_level = 0.0;
  bool reject = false;
  double d1 = 0.0;
  double d2 = 0.0;
  std::size_t tested_index = 0;  // position of the tested value in the input
};

void to_json(nlohmann::json& j, const TestDecision& d);

// Index of the window maximum; ties go to the earliest.
std::size_t window_argmax(std::span<const double> volumes);

double sr_statistic(std::span<const double> volumes, double gamma);
double sr_statistic_at(std::span<const double> volumes, std::size_t tested, double gamma);

// Critical value q_{r,(m-1)r}(1 - alpha_level).
double sr_critical_value(std::size_t m, double r, double alpha_level);

// Tests the window maximum.
TestDecision test_abnormal(std::span<const double> volumes, double r, double gamma, double alpha_level);
// Tests a value chosen before looking at the data.
TestDecision test_abnormal_at(std::span<const double> volumes, std::size_t tested, double r, double gamma,
                              double alpha_level);

enum class ExtremityClass { Absolute, Intermediate, Relative, NotExtreme };

std::string to_string(ExtremityClass c);
ExtremityClass extremity_from_string(const std::string& s);

struct ScanResult {
  std::vector<ExtremityClass> classes;
  std::vector<std::size_t> votes;
  std::vector<std::size_t> windows_containing;
};

// Slides a full window of size window_m over the series. A window votes for
// period i when i is its maximum and the test rejects. workers == 0 means
// hardware concurrency; the result does not depend on it.
ScanResult moving_window_classify(std::span<const double> volumes, std::size_t window_m, double r, double gamma,
                                  double alpha_level, unsigned workers = 1);

struct GGFit {
  GGParams params;
  double log_likelihood = 0.0;
};

void to_json(nlohmann::json& j, const GGFit& f);

// Maximum likelihood GG(r, gamma > 0, mu) fit; mu is profiled out.
GGFit fit_gg_mle(std::span<const double> x);

}  // namespace precip

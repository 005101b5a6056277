#pragma once

// Fitting negative binomial (NB) and generalized negative binomial (GNB)
// models to histograms of wet-period durations.
//
// Durations are counted in days and start at 1, while the GNB law lives on
// {0, 1, 2, ...}. Throughout this module a duration D is modelled as N + 1
// with N ~ GNB(r, gamma, mu), i.e. the model probability of duration k is
// gnb_pmf(k - 1).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "precip/distributions.hpp"

namespace precip {

struct DurationHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;  // duration (days) -> count
  std::uint64_t total = 0;

  double frequency(std::uint64_t duration) const;
  std::uint64_t max_duration() const;
};

enum class Metric { L1, L2, Linf };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

struct FitResult {
  GGParams params;
  Metric metric = Metric::L1;
  double distance = 0.0;
  std::optional<double> fixed_r;
  double chi_square_pvalue = 0.0;
};

void to_json(nlohmann::json& j, const FitResult& f);
void from_json(const nlohmann::json& j, FitResult& f);

DurationHistogram build_histogram(std::span<const std::uint64_t> durations);

// Model probabilities of durations 1..K, where K covers the histogram
// support and the GNB truncation range (capped at `cap`). Element i holds
// the probability of duration i + 1.
std::vector<double> shifted_gnb_probabilities(const DurationHistogram& h, const GGParams& p,
                                              std::uint64_t cap = 0);

/// Distance between histogram frequencies and the shifted GNB pmf.
double lp_distance(const DurationHistogram& h, const GGParams& p, Metric metric);

enum class NbMethod { MaxLikelihood, Moments };

// Negative binomial (gamma = 1) fit. The reported distance is l1.
FitResult fit_nb(std::span<const std::uint64_t> durations, NbMethod method = NbMethod::MaxLikelihood);
FitResult fit_nb(const DurationHistogram& h, NbMethod method = NbMethod::MaxLikelihood);

struct GnbFitOptions {
  Metric metric = Metric::L1;
  std::optional<double> fixed_r;
  std::optional<double> fixed_gamma;      // 1.0 restricts the search to NB
  std::vector<GGParams> extra_starts;     // tried in addition to the grid
};

// Minimizes lp_distance over the free parameters with a multi-start simplex
// search in log-parameter space. gamma is searched over (0, inf).
FitResult fit_gnb(const DurationHistogram& h, const GnbFitOptions& options = {});

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  int cells = 0;
  double pvalue = 1.0;
};

// Pearson statistic after pooling adjacent cells until each expected count
// is at least 5. Degrees of freedom: pooled cells - 1 - fitted_params.
ChiSquareResult pearson_chi_square(std::span<const double> observed, std::span<const double> expected,
                                   int fitted_params);

ChiSquareResult chi_square_test(const DurationHistogram& h, const GGParams& p, int fitted_params = 0);

/// Chi-square goodness-of-fit p-value of the shifted GNB model.
double chi_square_gof(const DurationHistogram& h, const GGParams& p, int fitted_params = 0);

}  // namespace precip

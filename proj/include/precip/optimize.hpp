#pragma once

#include <functional>
#include <span>
#include <vector>

namespace precip {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double f_tol = 1e-8;        // spread of objective values across the simplex
  double x_tol = 1e-8;        // simplex diameter
  double initial_step = 0.25;
  int max_evaluations = 4000;
  int restarts = 1;           // re-seed the simplex at the optimum this many times
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimization. Non-finite objective values are
// treated as +inf, so constraints can be encoded by returning infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options = {});

// Minimizes a unimodal f on [lo, hi] by golden-section search.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-10);

}  // namespace precip

#include "precip/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "precip/errors.hpp"

namespace precip {

namespace {

void require_shape(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(std::string(what) + ": shape must be positive and finite");
}

}  // namespace

double log_gamma_fn(double x) {
  if (!(x > 0.0) || std::isnan(x)) throw DomainError("log_gamma_fn: argument must be positive");
  return std::lgamma(x);
}

double reg_inc_gamma(double r, double x) {
  require_shape(r, "reg_inc_gamma");
  if (!(x >= 0.0)) throw DomainError("reg_inc_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(r, x);
}

double reg_inc_gamma_upper(double r, double x) {
  require_shape(r, "reg_inc_gamma_upper");
  if (!(x >= 0.0)) throw DomainError("reg_inc_gamma_upper: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(r, x);
}

double reg_inc_beta(double a, double b, double y) {
  require_shape(a, "reg_inc_beta");
  require_shape(b, "reg_inc_beta");
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("reg_inc_beta: y must lie in [0, 1]");
  return boost::math::ibeta(a, b, y);
}

double reg_inc_beta_upper(double a, double b, double y) {
  require_shape(a, "reg_inc_beta_upper");
  require_shape(b, "reg_inc_beta_upper");
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("reg_inc_beta_upper: y must lie in [0, 1]");
  return boost::math::ibetac(a, b, y);
}

}  // namespace precip

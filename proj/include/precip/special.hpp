#pragma once

namespace precip {

/// ln Γ(x) for x > 0.
double log_gamma_fn(double x);

/// Regularized lower incomplete gamma P(r, x) = γ(r, x) / Γ(r).
double reg_inc_gamma(double r, double x);

/// Regularized upper incomplete gamma Q(r, x) = 1 - P(r, x), accurate in the
/// far tail.
double reg_inc_gamma_upper(double r, double x);

/// Regularized incomplete beta I_y(a, b).
double reg_inc_beta(double a, double b, double y);

/// 1 - I_y(a, b).
double reg_inc_beta_upper(double a, double b, double y);

}  // namespace precip

#pragma once

// Special functions used by the generalized gamma model: log-gamma, the
// polygamma functions of order 0 and 1, and the regularized incomplete gamma
// pair. All functions are pure and safe to call concurrently.

namespace ggbayes {

/// log Gamma(x) for x > 0. Throws std::domain_error otherwise.
double ln_gamma(double x);

/// psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

/// psi'(x), x > 0. Always positive.
double trigamma(double x);

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
///
/// Uses the power series for x < s + 1 and a Lentz continued fraction for the
/// upper function otherwise, so that P + Q == 1 up to rounding.
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double reg_inc_gamma_upper(double s, double x);

}  // namespace ggbayes

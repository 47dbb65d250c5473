#pragma once

namespace storecast::special {

// Scalar special functions backing the distribution code: incomplete gamma
// and beta by series/continued fraction (Lentz), digamma/trigamma by
// recurrence plus asymptotic series, normal and Student-t CDF/quantiles.

double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Inverse of gamma_p in x: returns x with P(a, x) = p, p in (0, 1).
double gamma_p_inv(double a, double p);

/// Regularized incomplete beta I_x(a, b), x in [0, 1].
double beta_inc(double a, double b, double x);
/// Inverse of beta_inc in x.
double beta_inc_inv(double a, double b, double p);

double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

double t_pdf(double x, double nu);
double t_log_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

}  // namespace storecast::special

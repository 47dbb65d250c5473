#include "storecast/special.hpp"

#include <cmath>
#include <limits>

namespace storecast::special {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kMaxIter = 300;

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Continued fraction for Q(a, x) = 1 - P(a, x) by modified Lentz, x >= a + 1.
double gamma_q_lentz(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double digamma(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // ln x - 1/(2x) - sum B_2n / (2n x^{2n})
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 -
                                            inv2 * (1.0 / 132.0 -
                                                    inv2 * (691.0 / 32760.0))))));
  return result;
}

double trigamma(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv * (1.0 +
                   inv * (0.5 +
                          inv * (1.0 / 6.0 -
                                 inv2 * (1.0 / 30.0 -
                                         inv2 * (1.0 / 42.0 -
                                                 inv2 * (1.0 / 30.0 -
                                                         inv2 * (5.0 / 66.0 -
                                                                 inv2 * (691.0 / 2730.0))))))));
  return result;
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_lentz(a, x);
}

double gamma_p_inv(double a, double p) {
  // Bisection-secant hybrid on P(a, x) = p. A Wilson-Hilferty start sizes
  // the initial bracket.
  const double z = norm_quantile(p);
  const double wh = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
  double hi = a * std::max(wh * wh * wh, 1e-8) * 2.0 + 1.0;
  double lo = 0.0;
  while (gamma_p(a, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  double x = 0.5 * (lo + hi);
  double x_prev = lo;
  double f_prev = gamma_p(a, lo) - p;
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_p(a, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::fabs(f) < 1e-15 || hi - lo < 1e-13 * (1.0 + x)) break;
    double x_next;
    const double df = f - f_prev;
    if (std::fabs(df) > 1e-300) {
      x_next = x - f * (x - x_prev) / df;  // secant
    } else {
      x_next = 0.5 * (lo + hi);
    }
    if (!(x_next > lo && x_next < hi)) x_next = 0.5 * (lo + hi);
    x_prev = x;
    f_prev = f;
    x = x_next;
  }
  return x;
}

double beta_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_inc_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double x;
  if (a >= 1.0 && b >= 1.0) {
    // normal-approximation start
    const double pp = (p < 0.5) ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (p < t / w) {
      x = std::pow(a * w * p, 1.0 / a);
    } else {
      x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
  }
  const double a1 = a - 1.0;
  const double b1 = b - 1.0;
  const double lnbeta = lbeta(a, b);
  double lo = 0.0, hi = 1.0;
  if (x <= lo || x >= hi) x = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double err = beta_inc(a, b, x) - p;
    if (err > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::fabs(err) < 1e-16 || hi - lo < 1e-16) break;
    const double dfdx = std::exp(a1 * std::log(x) + b1 * std::log1p(-x) - lnbeta);
    double x_next = (dfdx > 1e-300) ? x - err / dfdx : 0.5 * (lo + hi);
    if (!(x_next > lo && x_next < hi)) x_next = 0.5 * (lo + hi);
    if (std::fabs(x_next - x) < 1e-16 * x) {
      x = x_next;
      break;
    }
    x = x_next;
  }
  return x;
}

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_quantile(double p) {
  // Acklam's rational approximation, then one Halley step off erfc.
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  }
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double t_log_pdf(double x, double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * kPi) -
         0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double t_pdf(double x, double nu) { return std::exp(t_log_pdf(x, nu)); }

double t_cdf(double x, double nu) {
  if (x == 0.0) return 0.5;
  const double w = nu / (nu + x * x);
  const double tail = 0.5 * beta_inc(0.5 * nu, 0.5, w);
  return x > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double nu) {
  if (p == 0.5) return 0.0;
  const double z = 2.0 * std::min(p, 1.0 - p);
  const double w = beta_inc_inv(0.5 * nu, 0.5, z);
  double t = std::sqrt(nu * (1.0 - w) / w);
  if (p < 0.5) t = -t;
  // one Newton polish against the CDF
  const double pdf = t_pdf(t, nu);
  if (pdf > 1e-300) t -= (t_cdf(t, nu) - p) / pdf;
  return t;
}

}  // namespace storecast::special

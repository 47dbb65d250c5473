#include "storecast/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "storecast/errors.hpp"
#include "storecast/rng.hpp"
#include "storecast/simplex.hpp"
#include "storecast/special.hpp"

namespace storecast {

namespace {

constexpr double kPenalty = 1e10;
constexpr double kRhoBound = 0.999;
constexpr double kUniformClamp = 1e-12;

std::vector<double> average_ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j + 1);  // 1-based run mean
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

/// ln c(u,v) for the Gaussian copula at precomputed normal scores; written
/// so that swapping x and y gives the bit-identical result.
double gaussian_logpdf(double rho, double x, double y) {
  const double onem = 1.0 - rho * rho;
  const double s = x * x + y * y;
  const double p = x * y;
  return -0.5 * std::log(onem) - (rho * rho * s - 2.0 * rho * p) / (2.0 * onem);
}

/// ln c(u,v) for the t-copula at precomputed t scores; symmetric in (x, y).
double t_logpdf(double rho, double nu, double x, double y) {
  const double onem = 1.0 - rho * rho;
  const double s = x * x + y * y;
  const double p = x * y;
  const double q = (s - 2.0 * rho * p) / (nu * onem);
  return std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
         2.0 * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(onem) -
         0.5 * (nu + 2.0) * std::log1p(q) +
         0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

double kendall_start(const PseudoObservations& u) {
  const double tau = kendall_tau(u.columns[0], u.columns[1]);
  if (std::fabs(tau) >= 1.0 - 1e-12) {
    raise(Errc::DegenerateData, "Kendall's tau is at its bound; dependence is deterministic");
  }
  return std::sin(1.5707963267948966 * tau);  // sin(pi*tau/2)
}

void require_bivariate(const PseudoObservations& u, std::size_t min_rows) {
  if (u.dims() != 2) {
    raise(Errc::KindMismatch,
          "expected 2 pseudo-observation columns, have " + std::to_string(u.dims()));
  }
  if (u.rows() < min_rows) {
    raise(Errc::TooFewRows, "need at least " + std::to_string(min_rows) +
                                " observations, have " + std::to_string(u.rows()));
  }
}

double clamp_uniform(double v) {
  return std::min(std::max(v, kUniformClamp), 1.0 - kUniformClamp);
}

void require_interior(double u, double v) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    raise(Errc::BoundaryInput, "copula density needs strictly interior (u, v)");
  }
}

}  // namespace

const char* copula_family_name(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::Student: return "student";
  }
  return "unknown";
}

PseudoObservations pseudo_observations(const std::vector<std::vector<double>>& columns) {
  if (columns.empty() || columns[0].size() < 2) {
    raise(Errc::TooFewRows, "pseudo-observations need at least 2 rows");
  }
  const std::size_t n = columns[0].size();
  PseudoObservations out;
  out.columns.reserve(columns.size());
  for (const auto& col : columns) {
    if (col.size() != n) raise(Errc::LengthMismatch, "columns have different lengths");
    auto ranks = average_ranks(col);
    const double denom = static_cast<double>(n + 1);
    for (double& r : ranks) r /= denom;
    out.columns.push_back(std::move(ranks));
  }
  return out;
}

double kendall_tau(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) raise(Errc::LengthMismatch, "vectors have different lengths");
  const std::size_t n = u.size();
  if (n < 2) raise(Errc::TooFewRows, "Kendall's tau needs at least 2 observations");
  long long concordant = 0, discordant = 0, ties_u = 0, ties_v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double du = u[i] - u[j];
      const double dv = v[i] - v[j];
      if (du == 0.0) ++ties_u;
      if (dv == 0.0) ++ties_v;
      if (du == 0.0 || dv == 0.0) continue;
      if ((du > 0.0) == (dv > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  if (ties_u == n0 || ties_v == n0) {
    raise(Errc::DegenerateData, "a column is constant; tau is undefined");
  }
  const double denom = std::sqrt(static_cast<double>(n0 - ties_u) *
                                 static_cast<double>(n0 - ties_v));
  return static_cast<double>(concordant - discordant) / denom;
}

GaussianCopulaParams fit_gaussian_copula(const PseudoObservations& u) {
  require_bivariate(u, 10);
  const double rho0 = kendall_start(u);

  const std::size_t n = u.rows();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = special::norm_quantile(u.columns[0][i]);
    const double y = special::norm_quantile(u.columns[1][i]);
    sxx += x * x + y * y;
    sxy += x * y;
  }
  // lnL(rho) = -n/2 ln(1-rho^2) - [rho^2 Sxx - 2 rho Sxy] / (2(1-rho^2))
  const auto neg_loglik = [&](const std::vector<double>& params) {
    const double rho = params[0];
    if (std::fabs(rho) >= kRhoBound) return kPenalty * (1.0 + std::fabs(rho));
    const double onem = 1.0 - rho * rho;
    return 0.5 * static_cast<double>(n) * std::log(onem) +
           (rho * rho * sxx - 2.0 * rho * sxy) / (2.0 * onem);
  };

  SimplexOptions opts;
  opts.max_iter = 200;
  opts.rel_tol = 1e-10;
  opts.initial_step = 0.05;
  const auto result = nelder_mead_restarted(neg_loglik, {rho0}, opts);
  if (!std::isfinite(result.fx) || result.fx >= 0.5 * kPenalty) {
    raise(Errc::OptimizerDiverged, "Gaussian copula likelihood did not stabilize");
  }
  GaussianCopulaParams out;
  out.rho = result.x[0];
  out.loglik = -result.fx;
  return out;
}

TCopulaParams fit_t_copula(const PseudoObservations& u) {
  require_bivariate(u, 30);
  const double rho0 = kendall_start(u);
  const std::size_t n = u.rows();

  const auto neg_loglik = [&](const std::vector<double>& params) {
    const double rho = params[0];
    const double lognu2 = params[1];
    double excess = std::fabs(rho) + std::fabs(lognu2);
    if (std::fabs(rho) >= kRhoBound || lognu2 > std::log(998.0) || lognu2 < -13.0) {
      return kPenalty * (1.0 + excess);
    }
    const double nu = 2.0 + std::exp(lognu2);
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = special::t_quantile(u.columns[0][i], nu);
      const double y = special::t_quantile(u.columns[1][i], nu);
      ll += t_logpdf(rho, nu, x, y);
    }
    return -ll;
  };

  // degrees-of-freedom grid picks the simplex start
  const double grid[] = {3.0, 5.0, 8.0, 12.0, 20.0, 30.0};
  double best_obj = std::numeric_limits<double>::infinity();
  double best_lognu2 = std::log(3.0);
  for (double nu : grid) {
    const double obj = neg_loglik({rho0, std::log(nu - 2.0)});
    if (obj < best_obj) {
      best_obj = obj;
      best_lognu2 = std::log(nu - 2.0);
    }
  }

  SimplexOptions opts;
  opts.max_iter = 400;
  opts.rel_tol = 1e-9;
  opts.initial_step = 0.1;
  const auto result = nelder_mead_restarted(neg_loglik, {rho0, best_lognu2}, opts);
  if (!std::isfinite(result.fx) || result.fx >= 0.5 * kPenalty) {
    raise(Errc::OptimizerDiverged, "t-copula likelihood did not stabilize");
  }
  TCopulaParams out;
  out.rho = result.x[0];
  out.nu = 2.0 + std::exp(result.x[1]);
  out.loglik = -result.fx;
  return out;
}

double copula_pdf(const GaussianCopulaParams& params, double u, double v) {
  require_interior(u, v);
  if (params.rho == 0.0) return 1.0;
  const double x = special::norm_quantile(u);
  const double y = special::norm_quantile(v);
  return std::exp(gaussian_logpdf(params.rho, x, y));
}

double copula_pdf(const TCopulaParams& params, double u, double v) {
  require_interior(u, v);
  const double x = special::t_quantile(u, params.nu);
  const double y = special::t_quantile(v, params.nu);
  return std::exp(t_logpdf(params.rho, params.nu, x, y));
}

PseudoObservations sample_copula(const GaussianCopulaParams& params, std::size_t n,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const double rho = params.rho;
  const double slope = std::sqrt(1.0 - rho * rho);
  PseudoObservations out;
  out.columns.assign(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    out.columns[0][i] = clamp_uniform(special::norm_cdf(z1));
    out.columns[1][i] = clamp_uniform(special::norm_cdf(rho * z1 + slope * z2));
  }
  return out;
}

PseudoObservations sample_copula(const TCopulaParams& params, std::size_t n,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const double rho = params.rho;
  const double nu = params.nu;
  const double slope = std::sqrt(1.0 - rho * rho);
  PseudoObservations out;
  out.columns.assign(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double scale = std::sqrt(rng.chi_square(nu) / nu);  // shared tail shock
    out.columns[0][i] = clamp_uniform(special::t_cdf(z1 / scale, nu));
    out.columns[1][i] = clamp_uniform(special::t_cdf((rho * z1 + slope * z2) / scale, nu));
  }
  return out;
}

GammaMarginal fit_gamma_marginal(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 10) {
    raise(Errc::TooFewRows,
          "gamma fit needs at least 10 observations, have " + std::to_string(n));
  }
  double mean = 0.0, mean_log = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) raise(Errc::NonPositiveData, "gamma marginal needs strictly positive data");
    mean += v;
    mean_log += std::log(v);
  }
  mean /= static_cast<double>(n);
  mean_log /= static_cast<double>(n);
  double s2 = 0.0;
  for (double v : x) s2 += (v - mean) * (v - mean);
  s2 /= static_cast<double>(n - 1);
  if (s2 <= 0.0) raise(Errc::DegenerateData, "gamma fit needs dispersed data");

  const double stat = std::log(mean) - mean_log;  // > 0 unless constant
  if (stat <= 0.0) raise(Errc::DegenerateData, "gamma fit needs dispersed data");

  double k = std::max(mean * mean / s2, 1e-8);  // method-of-moments start
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - special::digamma(k) - stat;
    const double fp = 1.0 / k - special::trigamma(k);
    double next = k - f / fp;
    if (!(next > 0.0)) next = 0.5 * k;
    if (std::fabs(next - k) <= 1e-12 * (1.0 + k)) {
      k = next;
      break;
    }
    k = next;
  }
  return {k, mean / k};
}

double gamma_cdf(double x, const GammaMarginal& m) {
  if (x <= 0.0) return 0.0;
  return special::gamma_p(m.shape, x / m.scale);
}

double gamma_quantile(double p, const GammaMarginal& m) {
  if (!(p > 0.0 && p < 1.0)) raise(Errc::BoundaryInput, "quantile level must be interior");
  return m.scale * special::gamma_p_inv(m.shape, p);
}

double gamma_log_likelihood(const std::vector<double>& x, const GammaMarginal& m) {
  double ll = 0.0;
  const double log_scale = std::log(m.scale);
  const double lg = std::lgamma(m.shape);
  for (double v : x) {
    if (!(v > 0.0)) raise(Errc::NonPositiveData, "gamma likelihood needs positive data");
    ll += (m.shape - 1.0) * std::log(v) - v / m.scale - m.shape * log_scale - lg;
  }
  return ll;
}

std::vector<std::vector<double>> inverse_cdf_map(const PseudoObservations& u,
                                                 const std::vector<GammaMarginal>& marginals) {
  if (u.dims() != marginals.size()) {
    raise(Errc::LengthMismatch, "need one marginal per pseudo-observation column");
  }
  std::vector<std::vector<double>> out(u.dims());
  for (std::size_t j = 0; j < u.dims(); ++j) {
    out[j].reserve(u.rows());
    for (double p : u.columns[j]) out[j].push_back(gamma_quantile(p, marginals[j]));
  }
  return out;
}

double value_at_risk(const std::vector<double>& samples, double level) {
  if (samples.empty()) raise(Errc::EmptyInput, "no samples");
  if (!(level > 0.0 && level < 1.0)) raise(Errc::BadFlag, "level must be in (0, 1)");
  const auto n = samples.size();
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  // ceil(level*n), nudged so an exact integer product stays put
  auto idx = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(n) - 1e-9));
  idx = std::min(std::max<std::size_t>(idx, 1), n);
  return sorted[idx - 1];
}

}  // namespace storecast

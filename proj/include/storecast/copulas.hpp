#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace storecast {

/// Rank-transformed data with entries strictly inside (0,1); one vector per
/// input column. Each column is a permutation of {1/(n+1), ..., n/(n+1)} up
/// to tie-averaging.
struct PseudoObservations {
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  std::size_t dims() const { return columns.size(); }
};

struct GaussianCopulaParams {
  double rho = 0.0;
  double loglik = 0.0;  // pseudo-log-likelihood at the fit
};

struct TCopulaParams {
  double rho = 0.0;
  double nu = 4.0;  // degrees of freedom, kept > 2 so the correlation exists
  double loglik = 0.0;
};

struct GammaMarginal {
  double shape = 1.0;  // k
  double scale = 1.0;  // theta
};

enum class CopulaFamily { Independence, Gaussian, Student };

const char* copula_family_name(CopulaFamily family);

/// Bivariate copula plus per-column gamma marginals; what copula-fit
/// serializes and copula-sample consumes.
struct JointModel {
  CopulaFamily family = CopulaFamily::Gaussian;
  double rho = 0.0;
  double nu = 0.0;  // meaningful when family == Student
  double loglik = 0.0;
  std::vector<GammaMarginal> marginals;
};

/// Column-wise average ranks divided by (n+1).
PseudoObservations pseudo_observations(const std::vector<std::vector<double>>& columns);

/// Kendall's tau-b: (concordant - discordant) pairs over the tie-corrected
/// pair count. O(n^2) pair scan.
double kendall_tau(const std::vector<double>& u, const std::vector<double>& v);

/// rho from the Kendall inversion sin(pi*tau/2), refined by maximizing the
/// bivariate pseudo-log-likelihood over rho in (-0.999, 0.999).
GaussianCopulaParams fit_gaussian_copula(const PseudoObservations& u);

/// Pseudo-maximum-likelihood over (rho, ln(nu-2)): Kendall inversion for
/// rho, a degrees-of-freedom grid {3,5,8,12,20,30} for the start, then
/// simplex refinement.
TCopulaParams fit_t_copula(const PseudoObservations& u);

/// Copula density at an interior point: elliptical joint density at the
/// quantile-transformed coordinates over the product of marginal densities.
double copula_pdf(const GaussianCopulaParams& params, double u, double v);
double copula_pdf(const TCopulaParams& params, double u, double v);

/// Elliptical sampling: correlated normals (scaled by an inverse chi-square
/// draw for the Student family) pushed through the marginal CDF.
PseudoObservations sample_copula(const GaussianCopulaParams& params, std::size_t n,
                                 std::uint64_t seed);
PseudoObservations sample_copula(const TCopulaParams& params, std::size_t n,
                                 std::uint64_t seed);

/// Method-of-moments start (k = m^2/s^2, theta = s^2/m, sample variance with
/// the n-1 divisor) refined by Newton steps on the profile MLE equation
/// ln k - digamma(k) = ln(mean) - mean(ln x); theta = mean/k at the root.
GammaMarginal fit_gamma_marginal(const std::vector<double>& x);

double gamma_cdf(double x, const GammaMarginal& m);
double gamma_quantile(double p, const GammaMarginal& m);
double gamma_log_likelihood(const std::vector<double>& x, const GammaMarginal& m);

/// x_ij = F_j^{-1}(u_ij) column by column.
std::vector<std::vector<double>> inverse_cdf_map(const PseudoObservations& u,
                                                 const std::vector<GammaMarginal>& marginals);

/// The ceil(level*n)-th order statistic of the samples.
double value_at_risk(const std::vector<double>& samples, double level);

}  // namespace storecast

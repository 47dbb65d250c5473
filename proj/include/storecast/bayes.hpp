#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "storecast/features.hpp"
#include "storecast/rng.hpp"

namespace storecast {

/// Conjugate prior for the regression block: beta ~ N(b0, (precision*I)^-1),
/// sigma^2 ~ inverse-gamma(a0, d0). precision = 0 is the improper flat prior.
struct RegressionPrior {
  std::vector<double> b0;  // prior mean; empty means all zeros
  double precision = 1e-4;
  double a0 = 0.01;
  double d0 = 0.01;
};

/// A fitted chain. draws holds every iteration (burn-in included) so traces
/// can show the warm-up; diagnostics and summaries use rows from burn_in on.
struct McmcChain {
  std::vector<std::string> param_names;
  std::vector<std::vector<double>> draws;  // draws[i][j]: iteration i, parameter j
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> acceptance_rates;  // Metropolis blocks only
  std::vector<std::string> warnings;

  std::size_t kept() const { return draws.size() - burn_in; }
};

enum class BayesModelKind { Gaussian, StudentT };

/// Gaussian-error linear regression by conjugate Gibbs. An intercept column
/// is prepended to the features; parameters come out as
/// [intercept, <feature names...>, sigma2].
McmcChain gibbs_gaussian_regression(const FeatureMatrix& features,
                                    const RegressionPrior& prior, std::size_t iters,
                                    std::size_t burn_in, std::uint64_t seed);

/// Student-t errors via the scale-mixture representation: per-row latent
/// lambda_i ~ Gamma((nu+1)/2, (nu + r_i^2/sigma^2)/2), weighted conjugate
/// sweeps for (beta, sigma^2), random-walk Metropolis on ln(nu-2) with a
/// uniform prior on nu in (2, 100] (step adapted toward 0.3 acceptance
/// during burn-in, frozen after), and a Beta(1,1)-conjugate draw for the
/// promo rate. Needs a binary column named "promo". Parameters:
/// [intercept, <feature names...>, sigma2, nu, promo_rate].
McmcChain fit_student_t_regression(const FeatureMatrix& features,
                                   const RegressionPrior& prior, std::size_t iters,
                                   std::size_t burn_in, std::uint64_t seed);

struct ParamDiagnostics {
  std::string name;
  double ess = 0.0;
  double geweke_z = 0.0;
};

/// ESS by Geyer's initial-positive-pairs rule, Geweke z from the first 10%
/// vs the last 50% with batch-means variance. A constant parameter reports
/// ess = N and z = 0.
std::vector<ParamDiagnostics> trace_diagnostics(const McmcChain& chain);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

/// Post-burn-in means, sample sds, and ceil(level*n) order-statistic
/// quantiles per parameter.
std::vector<ParamSummary> posterior_summary(const McmcChain& chain);

/// Resample chain rows (with replacement, seeded) and draw y* from the error
/// model at x_new' beta. x_new lists the covariates without the intercept.
std::vector<double> posterior_predictive(const McmcChain& chain, BayesModelKind kind,
                                         const std::vector<double>& x_new,
                                         std::size_t n_draws, std::uint64_t seed);

namespace bayes_detail {

/// One weighted conjugate sweep: beta | sigma2 from the normal with
/// precision (B0 + X'WX/sigma2), then sigma2 | beta from
/// IG(a0 + n/2, d0 + sum_i w_i r_i^2 / 2). The Gaussian sampler is exactly
/// this with unit weights; the Student sampler passes the latent lambdas.
/// design is row-major n x p with the intercept column already in place.
void conjugate_sweep(const std::vector<double>& design, std::size_t n, std::size_t p,
                     const std::vector<double>& y, const std::vector<double>& weights,
                     const RegressionPrior& prior, Rng& rng, std::vector<double>& beta,
                     double& sigma2);

}  // namespace bayes_detail

}  // namespace storecast

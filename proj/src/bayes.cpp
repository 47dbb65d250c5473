#include "storecast/bayes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "storecast/copulas.hpp"
#include "storecast/errors.hpp"

namespace storecast {

namespace {

/// Row-major design matrix with a leading intercept column.
std::vector<double> build_design(const FeatureMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t p = m.cols() + 1;
  std::vector<double> design(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    design[i * p] = 1.0;
    for (std::size_t j = 0; j < m.cols(); ++j) design[i * p + 1 + j] = m.at(i, j);
  }
  return design;
}

void require_finite(double v) {
  if (!std::isfinite(v)) raise(Errc::OptimizerDiverged, "sampler produced a non-finite draw");
}

void validate_run(const FeatureMatrix& m, const RegressionPrior& prior, std::size_t iters,
                  std::size_t burn_in) {
  m.validate();
  const std::size_t p = m.cols() + 1;
  if (m.rows() <= p) {
    raise(Errc::TooFewRows, "need more rows than coefficients (" + std::to_string(p) + ")");
  }
  if (iters == 0 || burn_in >= iters) raise(Errc::BadFlag, "need iters > burn_in >= 0");
  if (!prior.b0.empty() && prior.b0.size() != p) {
    raise(Errc::LengthMismatch, "prior mean must cover intercept plus features");
  }
}

std::vector<std::string> regression_names(const FeatureMatrix& m) {
  std::vector<std::string> names = {"intercept"};
  names.insert(names.end(), m.column_names.begin(), m.column_names.end());
  names.push_back("sigma2");
  return names;
}

/// ln p(lambda | nu) up to lambda-only terms, for the Metropolis step.
double nu_loglik(double nu, std::size_t n, double sum_log_lambda, double sum_lambda) {
  const double half = 0.5 * nu;
  return static_cast<double>(n) * (half * std::log(half) - std::lgamma(half)) +
         (half - 1.0) * sum_log_lambda - half * sum_lambda;
}

std::vector<double> column_slice(const McmcChain& chain, std::size_t j) {
  std::vector<double> out;
  out.reserve(chain.kept());
  for (std::size_t i = chain.burn_in; i < chain.draws.size(); ++i) {
    out.push_back(chain.draws[i][j]);
  }
  return out;
}

/// Variance of a segment's mean, estimated from batch means.
double batch_means_variance(const double* x, std::size_t len) {
  const std::size_t batches = std::max<std::size_t>(2, std::min<std::size_t>(20, len / 10));
  const std::size_t width = len / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < width; ++i) means[b] += x[b * width + i];
    means[b] /= static_cast<double>(width);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) /
                       static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  return var / static_cast<double>(batches);
}

}  // namespace

namespace bayes_detail {

void conjugate_sweep(const std::vector<double>& design, std::size_t n, std::size_t p,
                     const std::vector<double>& y, const std::vector<double>& weights,
                     const RegressionPrior& prior, Rng& rng, std::vector<double>& beta,
                     double& sigma2) {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Matrix> x(design.data(), static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(p));
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

  Matrix xw = x;
  for (Eigen::Index i = 0; i < xw.rows(); ++i) xw.row(i) *= weights[static_cast<std::size_t>(i)];

  Eigen::MatrixXd precision = (xw.transpose() * x) / sigma2;
  precision.diagonal().array() += prior.precision;
  Eigen::VectorXd rhs = (xw.transpose() * yv) / sigma2;
  if (!prior.b0.empty()) {
    for (std::size_t j = 0; j < p; ++j) rhs[static_cast<Eigen::Index>(j)] +=
        prior.precision * prior.b0[j];
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  // rounding can leave a tiny positive pivot where an exact factorization
  // would hit zero, so a rank-deficient design needs the ratio check too
  const auto pivots = llt.matrixLLT().diagonal();
  if (llt.info() != Eigen::Success || !(pivots.minCoeff() > 1e-7 * pivots.maxCoeff())) {
    raise(Errc::SingularPrecision, "posterior precision for beta is not positive definite");
  }
  const Eigen::VectorXd mu = llt.solve(rhs);

  Eigen::VectorXd z(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
  const Eigen::VectorXd draw = mu + llt.matrixU().solve(z);

  beta.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    beta[j] = draw[static_cast<Eigen::Index>(j)];
    require_finite(beta[j]);
  }

  const Eigen::VectorXd resid = yv - x * draw;
  double sse = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    sse += weights[static_cast<std::size_t>(i)] * resid[i] * resid[i];
  }
  const double shape = prior.a0 + 0.5 * static_cast<double>(n);
  const double rate = prior.d0 + 0.5 * sse;
  sigma2 = rate / rng.gamma(shape);
  require_finite(sigma2);
}

}  // namespace bayes_detail

McmcChain gibbs_gaussian_regression(const FeatureMatrix& features,
                                    const RegressionPrior& prior, std::size_t iters,
                                    std::size_t burn_in, std::uint64_t seed) {
  validate_run(features, prior, iters, burn_in);
  const std::size_t n = features.rows();
  const std::size_t p = features.cols() + 1;
  const auto design = build_design(features);
  const std::vector<double> unit(n, 1.0);

  McmcChain chain;
  chain.param_names = regression_names(features);
  chain.burn_in = burn_in;
  chain.seed = seed;
  chain.draws.reserve(iters);

  Rng rng(seed);
  std::vector<double> beta(p, 0.0);
  double sigma2 = 1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    bayes_detail::conjugate_sweep(design, n, p, features.y, unit, prior, rng, beta, sigma2);
    auto row = beta;
    row.push_back(sigma2);
    chain.draws.push_back(std::move(row));
  }
  return chain;
}

McmcChain fit_student_t_regression(const FeatureMatrix& features,
                                   const RegressionPrior& prior, std::size_t iters,
                                   std::size_t burn_in, std::uint64_t seed) {
  validate_run(features, prior, iters, burn_in);
  const auto promo_it = std::find(features.column_names.begin(),
                                  features.column_names.end(), "promo");
  if (promo_it == features.column_names.end()) {
    raise(Errc::MissingColumn, "the Student model needs a \"promo\" column");
  }
  const auto promo_col =
      static_cast<std::size_t>(promo_it - features.column_names.begin());
  const std::size_t n = features.rows();
  const std::size_t p = features.cols() + 1;
  std::size_t promo_on = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = features.at(i, promo_col);
    if (v != 0.0 && v != 1.0) raise(Errc::KindMismatch, "promo column must be 0/1");
    if (v == 1.0) ++promo_on;
  }

  const auto design = build_design(features);
  McmcChain chain;
  chain.param_names = regression_names(features);
  chain.param_names.push_back("nu");
  chain.param_names.push_back("promo_rate");
  chain.burn_in = burn_in;
  chain.seed = seed;
  chain.draws.reserve(iters);

  Rng rng(seed);
  std::vector<double> beta(p, 0.0);
  std::vector<double> lambda(n, 1.0);
  double sigma2 = 1.0;
  double nu = 10.0;
  double step = 0.4;
  std::size_t window_tries = 0, window_accepts = 0;
  std::size_t kept_tries = 0, kept_accepts = 0;

  for (std::size_t it = 0; it < iters; ++it) {
    bayes_detail::conjugate_sweep(design, n, p, features.y, lambda, prior, rng, beta, sigma2);

    // latent scales
    double sum_log_lambda = 0.0, sum_lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = features.y[i] - beta[0];
      for (std::size_t j = 1; j < p; ++j) r -= beta[j] * design[i * p + j];
      const double rate = 0.5 * (nu + r * r / sigma2);
      lambda[i] = rng.gamma(0.5 * (nu + 1.0)) / rate;
      require_finite(lambda[i]);
      sum_log_lambda += std::log(lambda[i]);
      sum_lambda += lambda[i];
    }

    // random walk on ln(nu-2); the Jacobian of the uniform nu prior is the
    // (phi' - phi) term
    const double phi = std::log(nu - 2.0);
    const double proposal = phi + step * rng.normal();
    const double nu_new = 2.0 + std::exp(proposal);
    ++window_tries;
    if (it >= burn_in) ++kept_tries;
    if (nu_new <= 100.0) {
      const double log_ratio = nu_loglik(nu_new, n, sum_log_lambda, sum_lambda) -
                               nu_loglik(nu, n, sum_log_lambda, sum_lambda) +
                               (proposal - phi);
      if (std::log(rng.uniform_open()) < log_ratio) {
        nu = nu_new;
        ++window_accepts;
        if (it >= burn_in) ++kept_accepts;
      }
    }
    if (it < burn_in && window_tries == 50) {
      const double rate = static_cast<double>(window_accepts) / 50.0;
      step = std::min(5.0, std::max(1e-3, step * std::exp(rate - 0.3)));
      window_tries = window_accepts = 0;
    }

    const double promo_rate = rng.beta(1.0 + static_cast<double>(promo_on),
                                       1.0 + static_cast<double>(n - promo_on));

    auto row = beta;
    row.push_back(sigma2);
    row.push_back(nu);
    row.push_back(promo_rate);
    chain.draws.push_back(std::move(row));
  }

  const double nu_rate = kept_tries == 0
                             ? 0.0
                             : static_cast<double>(kept_accepts) /
                                   static_cast<double>(kept_tries);
  chain.acceptance_rates["nu"] = nu_rate;
  if (nu_rate < 0.05) {
    chain.warnings.push_back("MetropolisStuck: nu acceptance " + std::to_string(nu_rate) +
                             " after burn-in");
  }
  return chain;
}

std::vector<ParamDiagnostics> trace_diagnostics(const McmcChain& chain) {
  const std::size_t n = chain.kept();
  if (chain.draws.size() <= chain.burn_in || n < 200) {
    raise(Errc::ChainTooShort, "diagnostics need at least 200 post-burn-in draws");
  }

  std::vector<ParamDiagnostics> out;
  out.reserve(chain.param_names.size());
  for (std::size_t j = 0; j < chain.param_names.size(); ++j) {
    const auto x = column_slice(chain, j);
    ParamDiagnostics d;
    d.name = chain.param_names[j];

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double gamma0 = 0.0;
    for (double v : x) gamma0 += (v - mean) * (v - mean);
    gamma0 /= static_cast<double>(n);

    if (gamma0 <= 0.0) {
      d.ess = static_cast<double>(n);  // a constant chain carries no noise at all
      d.geweke_z = 0.0;
      out.push_back(d);
      continue;
    }

    const auto autocorr = [&](std::size_t k) {
      double g = 0.0;
      for (std::size_t t = 0; t + k < n; ++t) g += (x[t] - mean) * (x[t + k] - mean);
      return g / static_cast<double>(n) / gamma0;
    };
    double rho_sum = 0.0;
    for (std::size_t k = 1; k + 1 < n; k += 2) {
      const double pair = autocorr(k) + autocorr(k + 1);
      if (pair <= 0.0) break;  // Geyer: stop at the first non-positive pair
      rho_sum += pair;
    }
    d.ess = static_cast<double>(n) / (1.0 + 2.0 * rho_sum);

    const std::size_t n_head = n / 10;
    const std::size_t n_tail = n / 2;
    const double* head = x.data();
    const double* tail = x.data() + (n - n_tail);
    const double head_mean =
        std::accumulate(head, head + n_head, 0.0) / static_cast<double>(n_head);
    const double tail_mean =
        std::accumulate(tail, tail + n_tail, 0.0) / static_cast<double>(n_tail);
    const double var = batch_means_variance(head, n_head) + batch_means_variance(tail, n_tail);
    d.geweke_z = var > 0.0 ? (head_mean - tail_mean) / std::sqrt(var) : 0.0;
    out.push_back(d);
  }
  return out;
}

std::vector<ParamSummary> posterior_summary(const McmcChain& chain) {
  if (chain.draws.size() <= chain.burn_in) {
    raise(Errc::EmptyChain, "no post-burn-in draws to summarize");
  }
  const std::size_t n = chain.kept();
  std::vector<ParamSummary> out;
  out.reserve(chain.param_names.size());
  for (std::size_t j = 0; j < chain.param_names.size(); ++j) {
    const auto x = column_slice(chain, j);
    ParamSummary s;
    s.name = chain.param_names[j];
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (double v : x) ss += (v - s.mean) * (v - s.mean);
      s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    s.q05 = value_at_risk(x, 0.05);
    s.q25 = value_at_risk(x, 0.25);
    s.q50 = value_at_risk(x, 0.50);
    s.q75 = value_at_risk(x, 0.75);
    s.q95 = value_at_risk(x, 0.95);
    out.push_back(s);
  }
  return out;
}

std::vector<double> posterior_predictive(const McmcChain& chain, BayesModelKind kind,
                                         const std::vector<double>& x_new,
                                         std::size_t n_draws, std::uint64_t seed) {
  if (chain.draws.size() <= chain.burn_in) raise(Errc::EmptyChain, "empty chain");
  const std::size_t want = kind == BayesModelKind::Gaussian ? x_new.size() + 2
                                                            : x_new.size() + 4;
  const bool tail_ok =
      kind == BayesModelKind::Gaussian
          ? chain.param_names.back() == "sigma2"
          : chain.param_names.back() == "promo_rate" &&
                chain.param_names[chain.param_names.size() - 2] == "nu";
  if (chain.param_names.size() != want || !tail_ok) {
    raise(Errc::KindMismatch, "chain layout does not match the requested model kind");
  }

  const std::size_t sigma_idx = x_new.size() + 1;
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n_draws);
  for (std::size_t d = 0; d < n_draws; ++d) {
    const std::size_t idx =
        chain.burn_in + static_cast<std::size_t>(rng.uniform_int(chain.kept()));
    const auto& row = chain.draws[idx];
    double mu = row[0];
    for (std::size_t j = 0; j < x_new.size(); ++j) mu += row[j + 1] * x_new[j];
    const double sigma = std::sqrt(row[sigma_idx]);
    if (kind == BayesModelKind::Gaussian) {
      out.push_back(mu + sigma * rng.normal());
    } else {
      out.push_back(mu + sigma * rng.student_t(row[sigma_idx + 1]));
    }
  }
  return out;
}

}  // namespace storecast

#include "storecast/lasso.hpp"

#include <cmath>

#include "storecast/errors.hpp"
#include "storecast/kernels.hpp"

namespace storecast {

namespace {

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

void check_columns(const std::vector<std::string>& trained,
                   const std::vector<std::string>& given) {
  if (trained != given) {
    raise(Errc::ColumnMismatch, "input columns do not match the fitted model");
  }
}

}  // namespace

std::vector<double> LassoModel::predict(const FeatureMatrix& input) const {
  check_columns(column_names, input.column_names);
  const std::size_t n = input.rows();
  const std::size_t p = beta.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = intercept + kernels::dot(input.row(i), beta.data(), p);
  }
  return out;
}

LassoModel fit_lasso(const FeatureMatrix& features, double lambda) {
  if (lambda < 0.0) raise(Errc::BadFlag, "lambda must be >= 0");
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  if (n < 2) raise(Errc::TooFewRows, "lasso needs at least 2 rows");

  // standardize columns (population sd); keep columns contiguous
  std::vector<double> means(p), sds(p);
  std::vector<std::vector<double>> cols(p);
  for (std::size_t j = 0; j < p; ++j) {
    cols[j] = features.column(j);
    means[j] = kernels::sum(cols[j].data(), n) / static_cast<double>(n);
    for (double& v : cols[j]) v -= means[j];
    const double var = kernels::sumsq(cols[j].data(), n) / static_cast<double>(n);
    sds[j] = var > 0.0 ? std::sqrt(var) : 0.0;
    for (double& v : cols[j]) v = sds[j] > 0.0 ? v / sds[j] : 0.0;
  }
  const double y_mean = kernels::sum(features.y.data(), n) / static_cast<double>(n);

  // residual starts at the centered target (all beta = 0)
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = features.y[i] - y_mean;

  std::vector<double> beta(p, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  double max_change = 0.0;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (sds[j] == 0.0) continue;
      // with unit-variance columns the coordinate minimizer is one
      // soft-threshold of the partial residual correlation
      const double rho = kernels::dot(cols[j].data(), r.data(), n) * inv_n + beta[j];
      const double next = soft_threshold(rho, lambda);
      const double delta = next - beta[j];
      if (delta != 0.0) {
        kernels::axpy(-delta, cols[j].data(), r.data(), n);
        beta[j] = next;
      }
      max_change = std::max(max_change, std::fabs(delta));
    }
    if (max_change < 1e-7) break;
  }
  if (max_change > 1e-4) {
    raise(Errc::DidNotConverge,
          "coordinate descent still moving " + std::to_string(max_change) +
              " after 10000 sweeps");
  }

  LassoModel model;
  model.column_names = features.column_names;
  model.lambda = lambda;
  model.means = means;
  model.sds = sds;
  model.beta.resize(p);
  double shift = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    model.beta[j] = sds[j] > 0.0 ? beta[j] / sds[j] : 0.0;
    shift += model.beta[j] * means[j];
  }
  model.intercept = y_mean - shift;
  return model;
}

double lasso_objective(const LassoModel& model, const FeatureMatrix& features) {
  check_columns(model.column_names, features.column_names);
  const auto pred = model.predict(features);
  const std::size_t n = features.rows();
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = features.y[i] - pred[i];
    sse += e * e;
  }
  double l1 = 0.0;
  for (std::size_t j = 0; j < model.beta.size(); ++j) {
    l1 += std::fabs(model.beta[j] * model.sds[j]);  // standardized-scale beta
  }
  return 0.5 * sse / static_cast<double>(n) + model.lambda * l1;
}

}  // namespace storecast

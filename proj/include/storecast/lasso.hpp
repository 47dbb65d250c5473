#pragma once

#include <string>
#include <vector>

#include "storecast/features.hpp"

namespace storecast {

/// L1-penalized linear regression. Coefficients are reported on the
/// original feature scale; `means`/`sds` record the standardization used
/// during fitting (zero-variance columns keep sd=0 and beta=0).
struct LassoModel {
  std::vector<std::string> column_names;
  std::vector<double> beta;  // original scale
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<double> means;
  std::vector<double> sds;

  std::vector<double> predict(const FeatureMatrix& input) const;
};

/// Cyclic coordinate descent with soft-thresholding on standardized
/// columns; stops when the largest coefficient change in a sweep is below
/// 1e-7, capped at 1e4 sweeps.
LassoModel fit_lasso(const FeatureMatrix& features, double lambda);

/// (1/2n)·SSE + lambda·‖beta‖₁ with beta on the standardized scale —
/// the quantity coordinate descent minimizes.
double lasso_objective(const LassoModel& model, const FeatureMatrix& features);

}  // namespace storecast

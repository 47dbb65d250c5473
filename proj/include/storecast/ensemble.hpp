#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "storecast/gbt.hpp"
#include "storecast/lasso.hpp"

namespace storecast {

struct BlendModel {
  double w0 = 0.0;
  double wa = 0.0;
  double wb = 0.0;
  bool singular_fallback = false;  // rank-deficient OLS -> simple average
};

/// OLS of y on [1, pred_a, pred_b]; falls back to an even average when the
/// normal matrix is singular.
BlendModel fit_blend(const std::vector<double>& pred_a, const std::vector<double>& pred_b,
                     const std::vector<double>& y);

std::vector<double> predict_blend(const BlendModel& model, const std::vector<double>& pred_a,
                                  const std::vector<double>& pred_b);

struct StackModel {
  LassoModel level1;  // plain linear (lambda = 0), refit on all rows
  GbtModel level2;    // trained on features + level-1 prediction column
  std::string level1_feature_name = "level1_pred";
};

/// Two-stage stacking: out-of-fold level-1 predictions (contiguous,
/// time-ordered folds) become an extra column for the level-2 learner.
StackModel fit_stack(const FeatureMatrix& features, const GbtParams& gbt_params, int folds,
                     std::uint64_t seed);

std::vector<double> predict_stack(const StackModel& model, const FeatureMatrix& features);

/// The out-of-fold level-1 column exactly as fit_stack builds it
/// (exposed so leakage can be asserted from outside).
std::vector<double> stack_oof_predictions(const FeatureMatrix& features, int folds);

}  // namespace storecast

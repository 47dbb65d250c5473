#include "storecast/ensemble.hpp"

#include <Eigen/Dense>

#include "storecast/errors.hpp"
#include "storecast/kernels.hpp"

namespace storecast {

BlendModel fit_blend(const std::vector<double>& pred_a, const std::vector<double>& pred_b,
                     const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (pred_a.size() != n || pred_b.size() != n) {
    raise(Errc::LengthMismatch, "blend inputs differ in length");
  }
  if (n < 3) raise(Errc::TooFewRows, "blend needs at least 3 points");

  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d row(1.0, pred_a[i], pred_b[i]);
    ata += row * row.transpose();
    atb += row * y[i];
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
  lu.setThreshold(1e-10);
  BlendModel model;
  if (lu.rank() < 3) {
    model.singular_fallback = true;
    model.w0 = 0.0;
    model.wa = 0.5;
    model.wb = 0.5;
    return model;
  }
  const Eigen::Vector3d w = lu.solve(atb);
  model.w0 = w(0);
  model.wa = w(1);
  model.wb = w(2);
  return model;
}

std::vector<double> predict_blend(const BlendModel& model, const std::vector<double>& pred_a,
                                  const std::vector<double>& pred_b) {
  if (pred_a.size() != pred_b.size()) {
    raise(Errc::LengthMismatch, "blend inputs differ in length");
  }
  std::vector<double> out(pred_a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = model.w0 + model.wa * pred_a[i] + model.wb * pred_b[i];
  }
  return out;
}

std::vector<double> stack_oof_predictions(const FeatureMatrix& features, int folds) {
  const std::size_t n = features.rows();
  if (folds < 2) raise(Errc::BadFlag, "need at least 2 folds");
  if (n < 2 * static_cast<std::size_t>(folds)) {
    raise(Errc::TooFewRows, "need at least 2 rows per fold");
  }
  std::vector<double> oof(n, 0.0);
  for (int k = 0; k < folds; ++k) {
    const std::size_t lo = n * static_cast<std::size_t>(k) / static_cast<std::size_t>(folds);
    const std::size_t hi =
        n * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(folds);
    FeatureMatrix rest;
    rest.column_names = features.column_names;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      const double* row = features.row(i);
      rest.x.insert(rest.x.end(), row, row + features.cols());
      rest.y.push_back(features.y[i]);
      rest.row_dates.push_back(features.row_dates[i]);
    }
    const auto fold_model = fit_lasso(rest, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      oof[i] = fold_model.intercept +
               kernels::dot(features.row(i), fold_model.beta.data(), fold_model.beta.size());
    }
  }
  return oof;
}

StackModel fit_stack(const FeatureMatrix& features, const GbtParams& gbt_params, int folds,
                     std::uint64_t seed) {
  StackModel model;
  const auto oof = stack_oof_predictions(features, folds);

  FeatureMatrix augmented = features;
  augmented.column_names.push_back(model.level1_feature_name);
  augmented.x.clear();
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* row = features.row(i);
    augmented.x.insert(augmented.x.end(), row, row + features.cols());
    augmented.x.push_back(oof[i]);
  }

  GbtParams params = gbt_params;
  params.seed = seed;
  model.level2 = fit_gbt(augmented, params);
  model.level1 = fit_lasso(features, 0.0);  // full refit for inference
  return model;
}

std::vector<double> predict_stack(const StackModel& model, const FeatureMatrix& features) {
  const auto level1 = model.level1.predict(features);
  FeatureMatrix augmented = features;
  augmented.column_names.push_back(model.level1_feature_name);
  augmented.x.clear();
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* row = features.row(i);
    augmented.x.insert(augmented.x.end(), row, row + features.cols());
    augmented.x.push_back(level1[i]);
  }
  return model.level2.predict(augmented);
}

}  // namespace storecast

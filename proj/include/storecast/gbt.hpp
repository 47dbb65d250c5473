#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "storecast/features.hpp"

namespace storecast {

struct GbtParams {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double subsample = 0.8;
  int min_leaf = 5;
  std::uint64_t seed = 0;
};

/// Flat binary tree. Internal nodes carry (feature, threshold) and route
/// rows with x[feature] < threshold left; leaves have feature = -1.
struct RegressionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;  // leaf prediction
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict_row(const double* row) const;
};

struct GbtModel {
  GbtParams params;
  std::vector<std::string> column_names;
  double base_score = 0.0;  // training-target mean
  std::vector<RegressionTree> trees;

  std::vector<double> predict(const FeatureMatrix& input) const;
  /// Predictions using only the first `stages` trees.
  std::vector<double> predict_stages(const FeatureMatrix& input, std::size_t stages) const;
};

/// Squared-error boosting: each stage fits an exact greedy variance-
/// reduction tree to the current residuals on a seeded subsample and adds
/// it scaled by the learning rate.
GbtModel fit_gbt(const FeatureMatrix& features, const GbtParams& params);

}  // namespace storecast

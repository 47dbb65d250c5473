#include "storecast/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "storecast/errors.hpp"
#include "storecast/rng.hpp"

namespace storecast {

namespace {

struct SortedFeature {
  std::vector<int> order;  // row indices sorted by feature value
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Exact greedy search: scan each feature in sorted order, try the midpoint
/// between every pair of distinct adjacent values, keep the strictly best
/// variance reduction. Ties keep the earlier (lower feature, lower
/// threshold) candidate because the scan only accepts on strict improvement.
Split best_split(const FeatureMatrix& x, const std::vector<double>& residual,
                 const std::vector<int>& rows, int min_leaf,
                 std::vector<int>& scratch) {
  Split best;
  const auto n = static_cast<int>(rows.size());
  if (n < 2 * min_leaf) return best;

  double total = 0.0;
  for (int r : rows) total += residual[r];

  for (std::size_t j = 0; j < x.cols(); ++j) {
    scratch.assign(rows.begin(), rows.end());
    std::sort(scratch.begin(), scratch.end(), [&](int a, int b) {
      const double va = x.at(a, j);
      const double vb = x.at(b, j);
      return va != vb ? va < vb : a < b;
    });
    double left_sum = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      left_sum += residual[scratch[i]];
      const double v = x.at(scratch[i], j);
      const double v_next = x.at(scratch[i + 1], j);
      if (v == v_next) continue;
      const int n_left = i + 1;
      const int n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      // variance reduction up to the constant parent term:
      // gain = sumL^2/nL + sumR^2/nR - total^2/n
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / n_left +
                          right_sum * right_sum / n_right - total * total / n;
      if (gain > best.gain) {
        best.feature = static_cast<int>(j);
        best.threshold = v + 0.5 * (v_next - v);
        best.gain = gain;
      }
    }
  }
  return best;
}

/// Left-to-right running mean; for identical inputs every increment is an
/// exact zero, so the mean of n copies of b is bitwise b.
double running_mean(const std::vector<double>& values, const std::vector<int>& rows) {
  double mean = 0.0;
  double k = 0.0;
  for (int r : rows) {
    k += 1.0;
    mean += (values[r] - mean) / k;
  }
  return mean;
}

int grow_node(RegressionTree& tree, const FeatureMatrix& x,
              const std::vector<double>& residual, const std::vector<double>& pred,
              std::vector<int> rows, int depth, const GbtParams& params,
              std::vector<int>& scratch) {
  // the optimal constant is the residual mean; expressed as mean(y) -
  // mean(pred) it cancels exactly when the stage has nothing to learn
  const double mean = running_mean(x.y, rows) - running_mean(pred, rows);

  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  tree.nodes[index].value = mean;

  if (depth >= params.max_depth) return index;
  const Split split = best_split(x, residual, rows, params.min_leaf, scratch);
  if (split.feature < 0 || split.gain <= 0.0) return index;

  std::vector<int> left_rows, right_rows;
  left_rows.reserve(rows.size());
  right_rows.reserve(rows.size());
  for (int r : rows) {
    (x.at(r, static_cast<std::size_t>(split.feature)) < split.threshold
         ? left_rows
         : right_rows)
        .push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();

  const int left = grow_node(tree, x, residual, pred, std::move(left_rows),
                             depth + 1, params, scratch);
  const int right = grow_node(tree, x, residual, pred, std::move(right_rows),
                              depth + 1, params, scratch);
  tree.nodes[index].feature = split.feature;
  tree.nodes[index].threshold = split.threshold;
  tree.nodes[index].left = left;
  tree.nodes[index].right = right;
  return index;
}

std::vector<int> draw_subsample(std::size_t n, double fraction, Rng& rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto keep = static_cast<std::size_t>(
      std::max(1.0, std::floor(fraction * static_cast<double>(n))));
  if (keep >= n) return all;  // subsample=1: identity, no shuffle
  // partial Fisher-Yates, then restore row order for determinism of sums
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + rng.uniform_int(n - i);
    std::swap(all[i], all[j]);
  }
  all.resize(keep);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

double RegressionTree::predict_row(const double* row) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = row[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].value;
}

std::vector<double> GbtModel::predict(const FeatureMatrix& input) const {
  return predict_stages(input, trees.size());
}

std::vector<double> GbtModel::predict_stages(const FeatureMatrix& input,
                                             std::size_t stages) const {
  if (column_names != input.column_names) {
    raise(Errc::ColumnMismatch, "input columns do not match the fitted model");
  }
  std::vector<double> out(input.rows(), base_score);
  for (std::size_t m = 0; m < std::min(stages, trees.size()); ++m) {
    for (std::size_t i = 0; i < input.rows(); ++i) {
      out[i] += params.learning_rate * trees[m].predict_row(input.row(i));
    }
  }
  return out;
}

GbtModel fit_gbt(const FeatureMatrix& features, const GbtParams& params) {
  if (params.n_trees < 1 || params.max_depth < 0 || params.min_leaf < 1 ||
      params.learning_rate <= 0.0 || params.learning_rate > 1.0 ||
      params.subsample <= 0.0 || params.subsample > 1.0) {
    raise(Errc::BadFlag, "invalid boosting parameters");
  }
  const std::size_t n = features.rows();
  if (n < 2 * static_cast<std::size_t>(params.min_leaf)) {
    raise(Errc::TooFewRows, "need at least 2*min_leaf rows");
  }

  GbtModel model;
  model.params = params;
  model.column_names = features.column_names;
  {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    model.base_score = running_mean(features.y, all);
  }

  std::vector<double> pred(n, model.base_score);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = features.y[i] - pred[i];

  Rng rng(params.seed);
  std::vector<int> scratch;
  for (int m = 0; m < params.n_trees; ++m) {
    auto rows = draw_subsample(n, params.subsample, rng);
    RegressionTree tree;
    grow_node(tree, features, residual, pred, std::move(rows), 0, params, scratch);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] += params.learning_rate * tree.predict_row(features.row(i));
      residual[i] = features.y[i] - pred[i];
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace storecast

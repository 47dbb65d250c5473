#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "storecast/arima.hpp"
#include "storecast/ensemble.hpp"
#include "storecast/panel.hpp"

namespace storecast {

double rmse(const std::vector<double>& y, const std::vector<double>& yhat);

enum class Method { Arima, Lasso, GbtTs, GbtIid, Blend, Stack };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BacktestOptions {
  std::vector<int> lags = {1, 2, 3, 4, 5, 6, 7};
  bool calendar = true;  // weekday/month/monthday encodings in TS features
  double lasso_lambda = 0.001;
  GbtParams gbt;
  int max_p = 3;
  int max_d = 1;
  int max_q = 3;
  int stack_folds = 5;
  // blend weights come from the tail window of train by default; the flag
  // switches to fitting them on the validation span instead
  bool blend_on_validation = false;
  double blend_window_fraction = 0.2;
};

struct BlendDetail {
  BlendModel weights;
  double window_rmse_a = 0.0;
  double window_rmse_b = 0.0;
  double window_rmse_blend = 0.0;
  double validation_rmse_a = 0.0;
  double validation_rmse_b = 0.0;
  double validation_rmse_blend = 0.0;
};

struct MethodResult {
  std::string method;
  std::string framing;  // "ts" or "iid"
  double rmse = 0.0;    // validation RMSE (log space)
  std::string error;    // non-empty when the method failed
  std::string model_digest;
  std::map<std::string, std::string> config;
  // log-space predictions aligned with the validation rows (empty on failure)
  std::vector<double> validation_pred;
};

struct BacktestReport {
  int store_id = 0;
  Date cutoff = 0;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::uint64_t seed = 0;
  std::vector<Date> validation_dates;
  std::vector<double> validation_actual;  // log space
  std::vector<MethodResult> results;      // sorted by method name
  std::optional<BlendDetail> blend;
};

/// Fit every requested method on the train span, score on validation.
/// Failures are captured per method; the harness itself only throws when
/// the split precondition fails.
BacktestReport backtest(const SalesPanel& panel, int store_id,
                        const std::vector<Method>& methods, const SplitSpec& split,
                        std::uint64_t seed, const BacktestOptions& options = {});

}  // namespace storecast

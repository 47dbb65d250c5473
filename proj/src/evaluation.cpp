#include "storecast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "storecast/errors.hpp"
#include "storecast/features.hpp"

namespace storecast {

namespace {

/// FNV-1a over the raw bytes of fitted parameters — lets callers check that
/// two runs trained identical models without shipping every coefficient.
class Digest {
 public:
  void feed(double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      hash_ ^= b;
      hash_ *= 1099511628211ull;
    }
  }
  void feed(const std::vector<double>& values) {
    for (double v : values) feed(v);
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
    return std::string(buf);
  }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

std::string digest_gbt(const GbtModel& model) {
  Digest d;
  d.feed(model.base_score);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      d.feed(static_cast<double>(node.feature));
      d.feed(node.threshold);
      d.feed(node.value);
    }
  }
  return d.hex();
}

std::string format_order(const ArimaOrder& o) {
  return "(" + std::to_string(o.p) + "," + std::to_string(o.d) + "," +
         std::to_string(o.q) + ")";
}

SeriesView slice_series(const SeriesView& s, std::size_t lo, std::size_t hi) {
  SeriesView out;
  out.store_id = s.store_id;
  out.dates.assign(s.dates.begin() + lo, s.dates.begin() + hi);
  out.log_sales.assign(s.log_sales.begin() + lo, s.log_sales.begin() + hi);
  return out;
}

struct Harness {
  const SalesPanel& panel;
  int store_id;
  const BacktestOptions& opts;
  std::uint64_t seed;
  SeriesView series;  // full store series
  SeriesView train;
  SeriesView validation;
  Date cutoff;
  FeatureMatrix ts_train;
  FeatureMatrix ts_validation;

  MethodResult run(Method m);
  MethodResult run_arima();
  MethodResult run_lasso();
  MethodResult run_gbt_ts();
  MethodResult run_gbt_iid();
  MethodResult run_blend(std::optional<BlendDetail>& detail);
  MethodResult run_stack();
  std::optional<BlendDetail> blend_detail;
};

FeatureSpec ts_spec(const BacktestOptions& opts) {
  FeatureSpec spec;
  spec.framing = Framing::TS;
  spec.lags = opts.lags;
  spec.include_promo = true;
  spec.weekday = opts.calendar;
  spec.monthday = opts.calendar;
  spec.month = opts.calendar;
  return spec;
}

MethodResult Harness::run_arima() {
  MethodResult r;
  r.method = method_name(Method::Arima);
  r.framing = "ts";
  const auto model = fit_arima(train, opts.max_p, opts.max_d, opts.max_q);
  const auto pred = forecast_arima(model, static_cast<int>(validation.size()));
  r.rmse = rmse(validation.log_sales, pred);
  r.validation_pred = pred;
  r.config["order"] = format_order(model.order);
  r.config["aic"] = std::to_string(model.aic);
  Digest d;
  d.feed(model.intercept);
  d.feed(model.phi);
  d.feed(model.theta);
  r.model_digest = d.hex();
  return r;
}

MethodResult Harness::run_lasso() {
  MethodResult r;
  r.method = method_name(Method::Lasso);
  r.framing = "ts";
  const auto model = fit_lasso(ts_train, opts.lasso_lambda);
  r.validation_pred = model.predict(ts_validation);
  r.rmse = rmse(ts_validation.y, r.validation_pred);
  r.config["lambda"] = std::to_string(opts.lasso_lambda);
  Digest d;
  d.feed(model.intercept);
  d.feed(model.beta);
  r.model_digest = d.hex();
  return r;
}

MethodResult Harness::run_gbt_ts() {
  MethodResult r;
  r.method = method_name(Method::GbtTs);
  r.framing = "ts";
  GbtParams params = opts.gbt;
  params.seed = seed;
  const auto model = fit_gbt(ts_train, params);
  r.validation_pred = model.predict(ts_validation);
  r.rmse = rmse(ts_validation.y, r.validation_pred);
  r.config["n_trees"] = std::to_string(params.n_trees);
  r.config["max_depth"] = std::to_string(params.max_depth);
  r.config["learning_rate"] = std::to_string(params.learning_rate);
  r.config["subsample"] = std::to_string(params.subsample);
  r.model_digest = digest_gbt(model);
  return r;
}

MethodResult Harness::run_gbt_iid() {
  MethodResult r;
  r.method = method_name(Method::GbtIid);
  r.framing = "iid";
  FeatureSpec spec;
  spec.framing = Framing::IID;
  spec.include_promo = true;

  const auto all = build_iid_features(panel, panel.store_ids(), spec, cutoff);
  auto [iid_train, rest] = split_by_date(all, cutoff);
  const auto target_only = build_iid_features(panel, {store_id}, spec, cutoff);
  auto [ignored, iid_validation] = split_by_date(target_only, cutoff);
  if (iid_validation.rows() == 0) {
    raise(Errc::EmptySelection, "no validation rows for store " + std::to_string(store_id));
  }

  GbtParams params = opts.gbt;
  params.seed = seed;
  const auto model = fit_gbt(iid_train, params);
  r.validation_pred = model.predict(iid_validation);
  r.rmse = rmse(iid_validation.y, r.validation_pred);
  r.config["n_trees"] = std::to_string(params.n_trees);
  r.config["max_depth"] = std::to_string(params.max_depth);
  r.config["stores"] = std::to_string(panel.store_ids().size());
  r.model_digest = digest_gbt(model);
  return r;
}

MethodResult Harness::run_blend(std::optional<BlendDetail>& detail) {
  MethodResult r;
  r.method = method_name(Method::Blend);
  r.framing = "ts";

  const auto n_train = train.size();
  const auto subtrain_len = static_cast<std::size_t>(
      std::floor((1.0 - opts.blend_window_fraction) * static_cast<double>(n_train)));
  if (subtrain_len < 10 || subtrain_len >= n_train) {
    raise(Errc::SpanTooShort, "train span too short to carve a blend window");
  }
  const auto subtrain = slice_series(train, 0, subtrain_len);
  const Date subtrain_cutoff = subtrain.dates.back();

  // component a: recursive forecast across blend window + validation
  const auto arima_model = fit_arima(subtrain, opts.max_p, opts.max_d, opts.max_q);
  const auto window_len = n_train - subtrain_len;
  const auto horizon = window_len + validation.size();
  const auto arima_pred = forecast_arima(arima_model, static_cast<int>(horizon));
  std::vector<double> a_window(arima_pred.begin(),
                               arima_pred.begin() + static_cast<std::ptrdiff_t>(window_len));
  std::vector<double> a_val(arima_pred.begin() + static_cast<std::ptrdiff_t>(window_len),
                            arima_pred.end());

  // component b: one-step-ahead boosted trees
  auto [sub_m, window_m] = split_by_date(ts_train, subtrain_cutoff);
  GbtParams params = opts.gbt;
  params.seed = seed;
  const auto gbt_model = fit_gbt(sub_m, params);
  const auto b_window = gbt_model.predict(window_m);
  const auto b_val = gbt_model.predict(ts_validation);

  const auto& y_window = window_m.y;
  const auto& y_val = ts_validation.y;
  const BlendModel weights = opts.blend_on_validation
                                 ? fit_blend(a_val, b_val, y_val)
                                 : fit_blend(a_window, b_window, y_window);

  BlendDetail bd;
  bd.weights = weights;
  bd.window_rmse_a = rmse(y_window, a_window);
  bd.window_rmse_b = rmse(y_window, b_window);
  bd.window_rmse_blend = rmse(y_window, predict_blend(weights, a_window, b_window));
  bd.validation_rmse_a = rmse(y_val, a_val);
  bd.validation_rmse_b = rmse(y_val, b_val);
  r.validation_pred = predict_blend(weights, a_val, b_val);
  bd.validation_rmse_blend = rmse(y_val, r.validation_pred);
  detail = bd;

  r.rmse = bd.validation_rmse_blend;
  r.config["w0"] = std::to_string(weights.w0);
  r.config["wa"] = std::to_string(weights.wa);
  r.config["wb"] = std::to_string(weights.wb);
  r.config["window"] = opts.blend_on_validation ? "validation" : "train_tail";
  Digest d;
  d.feed(weights.w0);
  d.feed(weights.wa);
  d.feed(weights.wb);
  d.feed(arima_model.intercept);
  d.feed(arima_model.phi);
  d.feed(arima_model.theta);
  r.model_digest = d.hex() + "/" + digest_gbt(gbt_model);
  return r;
}

MethodResult Harness::run_stack() {
  MethodResult r;
  r.method = method_name(Method::Stack);
  r.framing = "ts";
  const auto model = fit_stack(ts_train, opts.gbt, opts.stack_folds, seed);
  r.validation_pred = predict_stack(model, ts_validation);
  r.rmse = rmse(ts_validation.y, r.validation_pred);
  r.config["folds"] = std::to_string(opts.stack_folds);
  Digest d;
  d.feed(model.level1.intercept);
  d.feed(model.level1.beta);
  r.model_digest = d.hex() + "/" + digest_gbt(model.level2);
  return r;
}

MethodResult Harness::run(Method m) {
  switch (m) {
    case Method::Arima: return run_arima();
    case Method::Lasso: return run_lasso();
    case Method::GbtTs: return run_gbt_ts();
    case Method::GbtIid: return run_gbt_iid();
    case Method::Blend: return run_blend(blend_detail);
    case Method::Stack: return run_stack();
  }
  raise(Errc::UnknownCommand, "unhandled method");
}

}  // namespace

double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
  if (y.size() != yhat.size()) raise(Errc::LengthMismatch, "rmse inputs differ in length");
  if (y.empty()) raise(Errc::EmptyInput, "rmse of empty vectors");
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - yhat[i];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(y.size()));
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Arima: return "arima";
    case Method::Lasso: return "lasso";
    case Method::GbtTs: return "gbt_ts";
    case Method::GbtIid: return "gbt_iid";
    case Method::Blend: return "blend";
    case Method::Stack: return "stack";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "arima") return Method::Arima;
  if (name == "lasso") return Method::Lasso;
  if (name == "gbt" || name == "gbt_ts") return Method::GbtTs;
  if (name == "gbt_iid") return Method::GbtIid;
  if (name == "blend") return Method::Blend;
  if (name == "stack") return Method::Stack;
  raise(Errc::BadFlag, "unknown method '" + name + "'");
}

BacktestReport backtest(const SalesPanel& panel, int store_id,
                        const std::vector<Method>& methods, const SplitSpec& split,
                        std::uint64_t seed, const BacktestOptions& options) {
  Harness h{panel, store_id, options, seed, {}, {}, {}, 0, {}, {}, {}};
  h.series = log_series(panel, store_id);
  auto [train, validation] = train_validation_split(h.series, split);
  h.train = std::move(train);
  h.validation = std::move(validation);
  h.cutoff = split.cutoff_date ? *split.cutoff_date
                               : shift_months(h.series.dates.back(), -split.validation_months);

  const auto promo = promo_flags(panel, store_id);
  const auto ts_all = build_ts_features(h.series, promo, ts_spec(options));
  auto [ts_train, ts_validation] = split_by_date(ts_all, h.cutoff);
  h.ts_train = std::move(ts_train);
  h.ts_validation = std::move(ts_validation);

  BacktestReport report;
  report.store_id = store_id;
  report.cutoff = h.cutoff;
  report.train_rows = h.train.size();
  report.validation_rows = h.validation.size();
  report.seed = seed;
  report.validation_dates = h.validation.dates;
  report.validation_actual = h.validation.log_sales;

  for (Method m : methods) {
    MethodResult result;
    try {
      result = h.run(m);
    } catch (const Error& e) {
      result.method = method_name(m);
      result.framing = m == Method::GbtIid ? "iid" : "ts";
      result.error = std::string(errc_name(e.code())) + ": " + e.what();
    }
    report.results.push_back(std::move(result));
  }
  std::sort(report.results.begin(), report.results.end(),
            [](const MethodResult& a, const MethodResult& b) { return a.method < b.method; });
  report.blend = h.blend_detail;
  return report;
}

}  // namespace storecast

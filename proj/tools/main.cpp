#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "storecast/bayes.hpp"
#include "storecast/copulas.hpp"
#include "storecast/dates.hpp"
#include "storecast/errors.hpp"
#include "storecast/evaluation.hpp"
#include "storecast/features.hpp"
#include "storecast/kernels.hpp"
#include "storecast/model_io.hpp"
#include "storecast/panel.hpp"
#include "storecast/report.hpp"
#include "storecast/svg.hpp"
#include "storecast/vine.hpp"

namespace fs = std::filesystem;
using namespace storecast;

namespace {

// ---------------------------------------------------------------------------
// run directory plumbing

std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", &tm);
  return buf;
}

/// One run's output directory plus its log. Under --deterministic the
/// directory is the output root itself and log lines carry no wall-clock
/// times, so a rerun writes byte-identical artifacts.
struct RunContext {
  fs::path dir;
  bool deterministic = false;
  std::uint64_t seed = 42;
  std::vector<std::string> lines;

  void log(const std::string& line) {
    lines.push_back(deterministic ? line : "[" + now_iso() + "] " + line);
  }

  void write_text(const std::string& name, const std::string& bytes) {
    const fs::path path = dir / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot write " + path.string());
    out << bytes;
    log("wrote " + name + " (" + std::to_string(bytes.size()) + " bytes)");
  }

  void write_report(const Json& doc) {
    write_text("report.json", emit_report(doc, ReportFormat::Json));
    write_text("report.csv", emit_report(doc, ReportFormat::Csv));
  }

  void write_figure(const std::string& name, const PlotSpec& spec) {
    write_text("figures/" + name, emit_svg(spec));
  }

  void finish() {
    std::ofstream out(dir / "run.log", std::ios::binary);
    for (const auto& line : lines) out << line << '\n';
  }
};

// ---------------------------------------------------------------------------
// small shared helpers

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      raise(Errc::BadFlag, std::string("bad ") + what + " entry \"" + item + "\"");
    }
  }
  if (out.empty()) raise(Errc::BadFlag, std::string("empty ") + what + " list");
  return out;
}

SalesPanel load_panel(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  return load_sales_csv(in, schema);
}

std::vector<double> index_axis(std::size_t n, double start = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = start + static_cast<double>(i);
  return x;
}

std::vector<double> chain_column(const McmcChain& chain, std::size_t j, bool kept_only) {
  std::vector<double> out;
  const std::size_t from = kept_only ? chain.burn_in : 0;
  for (std::size_t i = from; i < chain.draws.size(); ++i) out.push_back(chain.draws[i][j]);
  return out;
}

double joint_pdf(const JointModel& model, double u, double v) {
  switch (model.family) {
    case CopulaFamily::Independence: return 1.0;
    case CopulaFamily::Gaussian: return copula_pdf(GaussianCopulaParams{model.rho, 0.0}, u, v);
    case CopulaFamily::Student:
      return copula_pdf(TCopulaParams{model.rho, model.nu, 0.0}, u, v);
  }
  raise(Errc::KindMismatch, "unknown copula family");
}

/// Log-sales columns for the selected stores on the dates every one of
/// them has an open, positive-sales row.
std::vector<std::vector<double>> joined_log_sales(const SalesPanel& panel,
                                                  const std::vector<int>& stores) {
  std::vector<SeriesView> views;
  for (int id : stores) views.push_back(log_series(panel, id));
  std::vector<Date> common = views[0].dates;
  for (std::size_t i = 1; i < views.size(); ++i) {
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), views[i].dates.begin(),
                          views[i].dates.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) raise(Errc::EmptySelection, "selected stores share no open days");

  std::vector<std::vector<double>> columns(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    std::size_t k = 0;
    for (Date d : common) {
      while (views[i].dates[k] < d) ++k;
      columns[i].push_back(views[i].log_sales[k]);
    }
  }
  return columns;
}

// ---------------------------------------------------------------------------
// flag bundles shared by the forecasting commands

struct SplitFlags {
  std::string cutoff;
  int validation_months = 2;
};

void add_split_flags(CLI::App* sub, SplitFlags& f) {
  sub->add_option("--cutoff", f.cutoff,
                  "last train date (YYYY-MM-DD); default: last date minus the validation span");
  sub->add_option("--validation-months", f.validation_months,
                  "validation span in months when --cutoff is absent");
}

SplitSpec to_split(const SplitFlags& f) {
  SplitSpec s;
  if (!f.cutoff.empty()) s.cutoff_date = parse_date(f.cutoff);
  s.validation_months = f.validation_months;
  return s;
}

struct ModelFlags {
  std::string lags = "1,2,3,4,5,6,7";
  bool no_calendar = false;
  double lasso_lambda = 0.001;
  int trees = 200;
  int depth = 4;
  double learning_rate = 0.1;
  double subsample = 0.8;
  int min_leaf = 5;
  int max_p = 3, max_d = 1, max_q = 3;
  int folds = 5;
  double blend_window = 0.2;
  bool blend_on_validation = false;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("--lags", f.lags, "lag set for the TS feature frame");
  sub->add_flag("--no-calendar", f.no_calendar, "drop calendar encodings from TS features");
  sub->add_option("--lasso-lambda", f.lasso_lambda, "L1 penalty");
  sub->add_option("--trees", f.trees, "boosting stages");
  sub->add_option("--depth", f.depth, "tree depth");
  sub->add_option("--learning-rate", f.learning_rate, "boosting shrinkage");
  sub->add_option("--subsample", f.subsample, "per-stage row fraction");
  sub->add_option("--min-leaf", f.min_leaf, "minimum rows per leaf");
  sub->add_option("--max-p", f.max_p, "largest AR order in the AIC grid");
  sub->add_option("--max-d", f.max_d, "largest differencing order");
  sub->add_option("--max-q", f.max_q, "largest MA order");
  sub->add_option("--folds", f.folds, "stacking folds");
  sub->add_option("--blend-window", f.blend_window, "train-tail fraction that fits blend weights");
  sub->add_flag("--blend-on-validation", f.blend_on_validation,
                "fit blend weights on the validation span instead of the train tail");
}

BacktestOptions to_options(const ModelFlags& f) {
  BacktestOptions o;
  o.lags = parse_int_list(f.lags, "lag");
  o.calendar = !f.no_calendar;
  o.lasso_lambda = f.lasso_lambda;
  o.gbt.n_trees = f.trees;
  o.gbt.max_depth = f.depth;
  o.gbt.learning_rate = f.learning_rate;
  o.gbt.subsample = f.subsample;
  o.gbt.min_leaf = f.min_leaf;
  o.max_p = f.max_p;
  o.max_d = f.max_d;
  o.max_q = f.max_q;
  o.stack_folds = f.folds;
  o.blend_window_fraction = f.blend_window;
  o.blend_on_validation = f.blend_on_validation;
  return o;
}

FeatureSpec ts_feature_spec(const BacktestOptions& opts) {
  FeatureSpec spec;
  spec.framing = Framing::TS;
  spec.lags = opts.lags;
  spec.include_promo = true;
  spec.weekday = opts.calendar;
  spec.monthday = opts.calendar;
  spec.month = opts.calendar;
  return spec;
}

Json method_row(const MethodResult& r) {
  Json row{{"method", r.method}, {"framing", r.framing}};
  if (r.error.empty()) {
    row["rmse"] = r.rmse;
  } else {
    row["error"] = r.error;
  }
  return row;
}

/// Figure with the validation actuals plus one line per finished method.
PlotSpec validation_figure(const BacktestReport& report, const std::string& title) {
  PlotSpec spec;
  spec.kind = PlotKind::Line;
  spec.title = title;
  spec.x_label = "days after cutoff";
  spec.y_label = "log sales";
  spec.series.push_back(
      {"actual", index_axis(report.validation_actual.size()), report.validation_actual});
  for (const auto& r : report.results) {
    if (r.error.empty() && r.validation_pred.size() == report.validation_actual.size()) {
      spec.series.push_back(
          {r.method, index_axis(r.validation_pred.size()), r.validation_pred});
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
  int stores = 3;
  int days = 400;
  double promo_rate = 0.3;
  double promo_uplift = 0.3;
  double ar_coeff = 0.5;
  double noise_sd = 0.1;
  double base_level = 8.0;
  double store_spread = 0.4;
  std::string start = "2013-01-01";
  bool keep_sundays_open = false;
};

int cmd_synth(RunContext& ctx, const SynthFlags& f) {
  GenParams gen;
  gen.promo_rate = f.promo_rate;
  gen.promo_uplift = f.promo_uplift;
  gen.ar_coeff = f.ar_coeff;
  gen.noise_sd = f.noise_sd;
  gen.base_level = f.base_level;
  gen.store_spread = f.store_spread;
  gen.start_date = parse_date(f.start);
  gen.close_sundays = !f.keep_sundays_open;

  const auto panel = synthesize_panel(ctx.seed, f.stores, f.days, gen);
  std::ostringstream csv;
  save_panel_csv(panel, csv);
  ctx.write_text("panel.csv", csv.str());

  Json doc{{"command", "synth"},
           {"seed", ctx.seed},
           {"stores", f.stores},
           {"days", f.days},
           {"first_date", date_to_iso(panel.min_date())},
           {"last_date", date_to_iso(panel.max_date())}};
  Json rows = Json::array();
  for (int id : panel.store_ids()) {
    const auto series = log_series(panel, id);
    double mean = 0.0;
    for (double v : series.log_sales) mean += v;
    mean /= static_cast<double>(series.size());
    rows.push_back(Json{{"store", id},
                        {"rows", panel.store_records(id).size()},
                        {"open_days", series.size()},
                        {"mean_log_sales", mean}});
  }
  doc["rows"] = std::move(rows);
  ctx.write_report(doc);

  const auto first = log_series(panel, panel.store_ids().front());
  PlotSpec fig;
  fig.kind = PlotKind::Line;
  fig.title = "store " + std::to_string(first.store_id) + " simulated log sales";
  fig.x_label = "open day index";
  fig.y_label = "log sales";
  fig.series.push_back({"log sales", index_axis(first.size()), first.log_sales});
  ctx.write_figure("panel.svg", fig);

  ctx.log("synthesized " + std::to_string(panel.size()) + " rows across " +
          std::to_string(f.stores) + " stores");
  return 0;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestFlags {
  std::string in;
  CsvSchema schema;
};

int cmd_ingest(RunContext& ctx, const IngestFlags& f) {
  const auto panel = load_panel(f.in, f.schema);
  std::ostringstream csv;
  save_panel_csv(panel, csv);
  ctx.write_text("panel.csv", csv.str());

  Json doc{{"command", "ingest"},
           {"records", panel.size()},
           {"first_date", date_to_iso(panel.min_date())},
           {"last_date", date_to_iso(panel.max_date())}};
  Json rows = Json::array();
  for (int id : panel.store_ids()) {
    const auto series = log_series(panel, id);
    rows.push_back(Json{{"store", id},
                        {"rows", panel.store_records(id).size()},
                        {"open_days", series.size()}});
  }
  doc["rows"] = std::move(rows);
  ctx.write_report(doc);
  ctx.log("ingested " + std::to_string(panel.size()) + " rows from " + f.in);
  return 0;
}

// ---------------------------------------------------------------------------
// forecast / blend / stack

struct ForecastFlags {
  std::string in;
  int store = 0;
  std::string method = "arima";
  SplitFlags split;
  ModelFlags model;
};

/// Refit the chosen method on the same train span the harness used so
/// model.json matches the report numbers exactly.
Json refit_model_json(const SalesPanel& panel, int store, Method method,
                      const BacktestReport& report, const BacktestOptions& opts,
                      std::uint64_t seed) {
  const auto series = log_series(panel, store);
  SplitSpec split;
  split.cutoff_date = report.cutoff;
  auto [train, validation] = train_validation_split(series, split);
  if (method == Method::Arima) {
    return to_json(fit_arima(train, opts.max_p, opts.max_d, opts.max_q));
  }
  if (method == Method::GbtIid) {
    FeatureSpec spec;
    spec.framing = Framing::IID;
    const auto all = build_iid_features(panel, panel.store_ids(), spec, report.cutoff);
    auto [iid_train, rest] = split_by_date(all, report.cutoff);
    GbtParams params = opts.gbt;
    params.seed = seed;
    return to_json(fit_gbt(iid_train, params));
  }
  const auto promo = promo_flags(panel, store);
  const auto ts_all = build_ts_features(series, promo, ts_feature_spec(opts));
  auto [ts_train, ts_validation] = split_by_date(ts_all, report.cutoff);
  if (method == Method::Lasso) return to_json(fit_lasso(ts_train, opts.lasso_lambda));
  GbtParams params = opts.gbt;
  params.seed = seed;
  return to_json(fit_gbt(ts_train, params));
}

int cmd_forecast(RunContext& ctx, const ForecastFlags& f) {
  const Method method = parse_method(f.method);
  if (method == Method::Blend || method == Method::Stack) {
    raise(Errc::BadFlag, "use the blend/stack commands for ensembles");
  }
  const auto panel = load_panel(f.in);
  const auto opts = to_options(f.model);
  const auto report = backtest(panel, f.store, {method}, to_split(f.split), ctx.seed, opts);
  const auto& result = report.results.front();
  if (!result.error.empty()) raise(Errc::DidNotConverge, result.error);

  Json doc{{"command", "forecast"},
           {"store", f.store},
           {"method", result.method},
           {"framing", result.framing},
           {"cutoff", date_to_iso(report.cutoff)},
           {"train_rows", report.train_rows},
           {"validation_rows", report.validation_rows},
           {"rmse", result.rmse},
           {"seed", ctx.seed},
           {"model_digest", result.model_digest}};
  for (const auto& [key, value] : result.config) doc[key] = value;
  ctx.write_report(doc);

  ctx.write_text("model.json",
                 emit_report(refit_model_json(panel, f.store, method, report, opts, ctx.seed),
                             ReportFormat::Json));
  ctx.write_figure("forecast.svg",
                   validation_figure(report, "store " + std::to_string(f.store) +
                                                 " validation forecast (" + result.method + ")"));
  ctx.log(result.method + " validation rmse " + std::to_string(result.rmse));
  std::cout << result.method << " rmse " << result.rmse << "\n";
  return 0;
}

struct EnsembleFlags {
  std::string in;
  int store = 0;
  SplitFlags split;
  ModelFlags model;
};

int cmd_blend(RunContext& ctx, const EnsembleFlags& f) {
  const auto panel = load_panel(f.in);
  const auto report = backtest(panel, f.store, {Method::Arima, Method::GbtTs, Method::Blend},
                               to_split(f.split), ctx.seed, to_options(f.model));
  Json doc{{"command", "blend"},
           {"store", f.store},
           {"cutoff", date_to_iso(report.cutoff)},
           {"seed", ctx.seed}};
  Json rows = Json::array();
  for (const auto& r : report.results) rows.push_back(method_row(r));
  doc["rows"] = std::move(rows);
  if (report.blend) {
    doc["w0"] = report.blend->weights.w0;
    doc["wa"] = report.blend->weights.wa;
    doc["wb"] = report.blend->weights.wb;
    doc["window_rmse_arima"] = report.blend->window_rmse_a;
    doc["window_rmse_gbt"] = report.blend->window_rmse_b;
    doc["window_rmse_blend"] = report.blend->window_rmse_blend;
  }
  ctx.write_report(doc);
  ctx.write_figure("blend.svg", validation_figure(
                                    report, "store " + std::to_string(f.store) + " blend"));
  for (const auto& r : report.results) {
    ctx.log(r.method + (r.error.empty() ? " rmse " + std::to_string(r.rmse) : " failed: " + r.error));
  }
  return 0;
}

int cmd_stack(RunContext& ctx, const EnsembleFlags& f) {
  const auto panel = load_panel(f.in);
  const auto report = backtest(panel, f.store, {Method::Lasso, Method::Stack},
                               to_split(f.split), ctx.seed, to_options(f.model));
  Json doc{{"command", "stack"},
           {"store", f.store},
           {"cutoff", date_to_iso(report.cutoff)},
           {"seed", ctx.seed}};
  Json rows = Json::array();
  for (const auto& r : report.results) rows.push_back(method_row(r));
  doc["rows"] = std::move(rows);
  ctx.write_report(doc);
  ctx.write_figure("stack.svg", validation_figure(
                                    report, "store " + std::to_string(f.store) + " stacking"));
  for (const auto& r : report.results) {
    ctx.log(r.method + (r.error.empty() ? " rmse " + std::to_string(r.rmse) : " failed: " + r.error));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// backtest

struct BacktestFlags {
  std::string in;
  int store = 0;
  std::string stores;
  bool all_stores = false;
  std::string methods = "arima,gbt,blend";
  SplitFlags split;
  ModelFlags model;
};

int cmd_backtest(RunContext& ctx, const BacktestFlags& f) {
  const auto panel = load_panel(f.in);
  std::vector<int> stores;
  if (f.all_stores) {
    stores = panel.store_ids();
  } else if (!f.stores.empty()) {
    stores = parse_int_list(f.stores, "store");
  } else if (f.store > 0) {
    stores = {f.store};
  } else {
    raise(Errc::BadFlag, "pick --store, --stores, or --all-stores");
  }

  std::vector<Method> methods;
  for (const auto& name : split_list(f.methods)) methods.push_back(parse_method(name));
  if (methods.empty()) raise(Errc::BadFlag, "empty --methods list");

  const auto split = to_split(f.split);
  const auto opts = to_options(f.model);

  struct StoreRun {
    BacktestReport report;
    std::string error;
  };
  std::vector<StoreRun> runs(stores.size());
  const auto worker_count =
      std::min<std::size_t>(stores.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = cursor.fetch_add(1)) < stores.size();) {
        try {
          runs[i].report = backtest(panel, stores[i], methods, split, ctx.seed, opts);
        } catch (const std::exception& e) {
          runs[i].error = e.what();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  ctx.log("backtested " + std::to_string(stores.size()) + " stores on " +
          std::to_string(worker_count) + " threads");

  Json doc{{"command", "backtest"}, {"seed", ctx.seed}, {"methods", f.methods}};
  Json rows = Json::array();
  for (std::size_t i = 0; i < stores.size(); ++i) {
    if (!runs[i].error.empty()) {
      rows.push_back(Json{{"store", stores[i]}, {"error", runs[i].error}});
      ctx.log("store " + std::to_string(stores[i]) + " failed: " + runs[i].error);
      continue;
    }
    for (const auto& r : runs[i].report.results) {
      Json row = method_row(r);
      row["store"] = stores[i];
      row["cutoff"] = date_to_iso(runs[i].report.cutoff);
      rows.push_back(std::move(row));
    }
  }
  doc["rows"] = std::move(rows);
  ctx.write_report(doc);

  if (stores.size() == 1 && runs[0].error.empty()) {
    ctx.write_figure("backtest.svg",
                     validation_figure(runs[0].report,
                                       "store " + std::to_string(stores[0]) + " validation"));
    for (const auto& r : runs[0].report.results) {
      std::cout << r.method << (r.error.empty() ? " rmse " + std::to_string(r.rmse)
                                                : " failed: " + r.error)
                << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// copula-fit / copula-sample

struct CopulaFitFlags {
  std::string in;
  int store_a = 0;
  int store_b = 0;
  std::string family = "auto";
};

int cmd_copula_fit(RunContext& ctx, const CopulaFitFlags& f) {
  if (f.family != "auto" && f.family != "gaussian" && f.family != "student") {
    raise(Errc::BadFlag, "--family must be auto, gaussian, or student");
  }
  const auto panel = load_panel(f.in);
  const auto columns = joined_log_sales(panel, {f.store_a, f.store_b});
  const auto n = columns[0].size();
  const auto u = pseudo_observations(columns);
  const double tau = kendall_tau(u.columns[0], u.columns[1]);

  // marginals act on the raw sales scale
  std::vector<std::vector<double>> sales(2);
  for (std::size_t j = 0; j < 2; ++j) {
    for (double v : columns[j]) sales[j].push_back(std::exp(v));
  }

  JointModel model;
  model.marginals = {fit_gamma_marginal(sales[0]), fit_gamma_marginal(sales[1])};
  const auto gaussian = fit_gaussian_copula(u);
  const auto student = fit_t_copula(u);
  const double aic_gaussian = 2.0 - 2.0 * gaussian.loglik;
  const double aic_student = 4.0 - 2.0 * student.loglik;
  const bool pick_student = f.family == "student" ||
                            (f.family == "auto" && aic_student < aic_gaussian);
  if (pick_student) {
    model.family = CopulaFamily::Student;
    model.rho = student.rho;
    model.nu = student.nu;
    model.loglik = student.loglik;
  } else {
    model.family = CopulaFamily::Gaussian;
    model.rho = gaussian.rho;
    model.nu = 0.0;
    model.loglik = gaussian.loglik;
  }

  ctx.write_text("model.json", emit_report(to_json(model), ReportFormat::Json));
  Json doc{{"command", "copula-fit"},
           {"store_a", f.store_a},
           {"store_b", f.store_b},
           {"n", n},
           {"kendall_tau", tau},
           {"family", copula_family_name(model.family)},
           {"rho", model.rho},
           {"nu", model.nu},
           {"loglik", model.loglik},
           {"aic_gaussian", aic_gaussian},
           {"aic_student", aic_student},
           {"marginal_a_shape", model.marginals[0].shape},
           {"marginal_a_scale", model.marginals[0].scale},
           {"marginal_b_shape", model.marginals[1].shape},
           {"marginal_b_scale", model.marginals[1].scale}};
  ctx.write_report(doc);

  PlotSpec scatter;
  scatter.kind = PlotKind::Scatter;
  scatter.title = "pseudo-observations, stores " + std::to_string(f.store_a) + " and " +
                  std::to_string(f.store_b);
  scatter.x_label = "store " + std::to_string(f.store_a) + " rank";
  scatter.y_label = "store " + std::to_string(f.store_b) + " rank";
  scatter.series.push_back({"ranks", u.columns[0], u.columns[1]});
  ctx.write_figure("pseudo_obs.svg", scatter);

  constexpr std::size_t kCells = 60;
  PlotSpec heat;
  heat.kind = PlotKind::Heatmap;
  heat.title = std::string(copula_family_name(model.family)) + " copula density";
  heat.x_label = "u";
  heat.y_label = "v";
  heat.grid_rows = kCells;
  heat.grid_cols = kCells;
  for (std::size_t r = 0; r < kCells; ++r) {
    const double v = (static_cast<double>(r) + 0.5) / kCells;
    for (std::size_t c = 0; c < kCells; ++c) {
      const double uu = (static_cast<double>(c) + 0.5) / kCells;
      heat.grid.push_back(std::log1p(joint_pdf(model, uu, v)));
    }
  }
  ctx.write_figure("copula_density.svg", heat);

  ctx.log("fit " + std::string(copula_family_name(model.family)) + " copula, tau " +
          std::to_string(tau));
  std::cout << copula_family_name(model.family) << " rho " << model.rho << " tau " << tau
            << "\n";
  return 0;
}

struct CopulaSampleFlags {
  std::string model;
  int n = 5000;
  double level = 0.95;
};

int cmd_copula_sample(RunContext& ctx, const CopulaSampleFlags& f) {
  if (f.n < 1) raise(Errc::BadFlag, "--n must be positive");
  if (!(f.level > 0.0) || !(f.level < 1.0)) raise(Errc::BadFlag, "--level must be in (0,1)");
  std::ifstream in(f.model, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + f.model);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto model = joint_model_from_json(parse_report(buffer.str(), ReportFormat::Json));
  if (model.marginals.size() != 2) {
    raise(Errc::KindMismatch, "joint model needs two marginals");
  }

  PseudoObservations u;
  const auto count = static_cast<std::size_t>(f.n);
  switch (model.family) {
    case CopulaFamily::Gaussian:
      u = sample_copula(GaussianCopulaParams{model.rho, model.loglik}, count, ctx.seed);
      break;
    case CopulaFamily::Student:
      u = sample_copula(TCopulaParams{model.rho, model.nu, model.loglik}, count, ctx.seed);
      break;
    case CopulaFamily::Independence: {
      Rng rng(ctx.seed);
      u.columns.assign(2, std::vector<double>(count));
      for (std::size_t i = 0; i < count; ++i) {
        u.columns[0][i] = rng.uniform_open();
        u.columns[1][i] = rng.uniform_open();
      }
      break;
    }
  }

  const auto mapped = inverse_cdf_map(u, model.marginals);
  std::string csv = "u_a,u_b,sales_a,sales_b\n";
  char line[160];
  std::vector<double> sums(count);
  for (std::size_t i = 0; i < count; ++i) {
    sums[i] = mapped[0][i] + mapped[1][i];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", u.columns[0][i],
                  u.columns[1][i], mapped[0][i], mapped[1][i]);
    csv += line;
  }
  ctx.write_text("samples.csv", csv);

  const double var_sum = value_at_risk(sums, f.level);
  Json doc{{"command", "copula-sample"},
           {"family", copula_family_name(model.family)},
           {"n", f.n},
           {"seed", ctx.seed},
           {"level", f.level},
           {"portfolio_var", var_sum},
           {"var_a", value_at_risk(mapped[0], f.level)},
           {"var_b", value_at_risk(mapped[1], f.level)}};
  ctx.write_report(doc);

  PlotSpec scatter;
  scatter.kind = PlotKind::Scatter;
  scatter.title = std::string(copula_family_name(model.family)) + " copula sample";
  scatter.x_label = "u";
  scatter.y_label = "v";
  scatter.series.push_back({"draws", u.columns[0], u.columns[1]});
  ctx.write_figure("samples_uniform.svg", scatter);

  PlotSpec hist;
  hist.kind = PlotKind::Histogram;
  hist.title = "portfolio sales with VaR(" + std::to_string(f.level).substr(0, 4) + ") = " +
               std::to_string(var_sum);
  hist.x_label = "summed sales";
  hist.y_label = "draws";
  hist.bins = 40;
  hist.series.push_back({"portfolio", {}, sums});
  ctx.write_figure("portfolio.svg", hist);

  ctx.log("portfolio VaR at " + std::to_string(f.level) + ": " + std::to_string(var_sum));
  std::cout << "portfolio VaR " << var_sum << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// vine-fit

struct VineFitFlags {
  std::string in;
  std::string stores;
  std::string families = "gaussian,student";
};

int cmd_vine_fit(RunContext& ctx, const VineFitFlags& f) {
  const auto store_ids = parse_int_list(f.stores, "store");
  FamilySet allowed{false, false};
  for (const auto& name : split_list(f.families)) {
    if (name == "gaussian") {
      allowed.gaussian = true;
    } else if (name == "student") {
      allowed.student = true;
    } else {
      raise(Errc::BadFlag, "unknown family \"" + name + "\"");
    }
  }

  const auto panel = load_panel(f.in);
  const auto columns = joined_log_sales(panel, store_ids);
  const auto u = pseudo_observations(columns);
  const auto spec = fit_cvine(u, allowed);
  ctx.write_text("model.json", emit_report(to_json(spec), ReportFormat::Json));

  const auto d = store_ids.size();
  std::string order;
  for (std::size_t v : spec.order) {
    if (!order.empty()) order += ">";
    order += std::to_string(store_ids[v]);
  }
  Json doc{{"command", "vine-fit"},
           {"stores", f.stores},
           {"n", u.rows()},
           {"order", order}};
  Json rows = Json::array();
  for (std::size_t t = 0; t < spec.trees.size(); ++t) {
    for (const auto& edge : spec.trees[t]) {
      std::string label = std::to_string(store_ids[edge.var_a]) + "," +
                          std::to_string(store_ids[edge.var_b]);
      if (!edge.conditioned_on.empty()) {
        label += "|";
        for (std::size_t k = 0; k < edge.conditioned_on.size(); ++k) {
          if (k) label += ",";
          label += std::to_string(store_ids[edge.conditioned_on[k]]);
        }
      }
      Json row{{"tree", t + 1},
               {"edge", label},
               {"family", copula_family_name(edge.family)},
               {"tau", edge.tau},
               {"loglik", edge.loglik}};
      if (edge.family != CopulaFamily::Independence) row["rho"] = edge.rho;
      if (edge.family == CopulaFamily::Student) row["nu"] = edge.nu;
      rows.push_back(std::move(row));
    }
  }
  doc["rows"] = std::move(rows);
  ctx.write_report(doc);

  PlotSpec heat;
  heat.kind = PlotKind::Heatmap;
  heat.title = "pairwise Kendall tau";
  heat.x_label = "store index";
  heat.y_label = "store index";
  heat.grid_rows = d;
  heat.grid_cols = d;
  heat.grid_x1 = static_cast<double>(d);
  heat.grid_y1 = static_cast<double>(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      heat.grid.push_back(r == c ? 1.0 : kendall_tau(u.columns[r], u.columns[c]));
    }
  }
  ctx.write_figure("tau_matrix.svg", heat);

  ctx.log("fit C-vine on " + std::to_string(d) + " stores, " + std::to_string(u.rows()) +
          " joint observations");
  std::cout << "vine order " << order << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bayes-gaussian / bayes-student

struct BayesFlags {
  std::string in;
  std::string stores;
  bool all_stores = false;
  int iters = 4000;
  int burn_in = 1000;
  double precision = 1e-4;
};

FeatureMatrix bayes_features(const SalesPanel& panel, const BayesFlags& f) {
  std::vector<int> stores;
  if (f.all_stores) {
    stores = panel.store_ids();
  } else if (!f.stores.empty()) {
    stores = parse_int_list(f.stores, "store");
  } else {
    raise(Errc::BadFlag, "pick --stores or --all-stores");
  }
  FeatureSpec spec;
  spec.framing = Framing::IID;
  return build_iid_features(panel, stores, spec, panel.max_date());
}

Json chain_report(const char* command, const McmcChain& chain, std::size_t n_rows) {
  const auto summary = posterior_summary(chain);
  const auto diagnostics = trace_diagnostics(chain);
  Json doc{{"command", command},
           {"observations", n_rows},
           {"iterations", chain.draws.size()},
           {"burn_in", chain.burn_in},
           {"seed", chain.seed}};
  for (const auto& [name, rate] : chain.acceptance_rates) {
    doc["acceptance_" + name] = rate;
  }
  if (!chain.warnings.empty()) {
    std::string joined;
    for (const auto& w : chain.warnings) {
      if (!joined.empty()) joined += "; ";
      joined += w;
    }
    doc["warnings"] = joined;
  }
  Json rows = Json::array();
  for (std::size_t j = 0; j < summary.size(); ++j) {
    rows.push_back(Json{{"param", summary[j].name},
                        {"mean", summary[j].mean},
                        {"sd", summary[j].sd},
                        {"q05", summary[j].q05},
                        {"q25", summary[j].q25},
                        {"q50", summary[j].q50},
                        {"q75", summary[j].q75},
                        {"q95", summary[j].q95},
                        {"ess", diagnostics[j].ess},
                        {"geweke_z", diagnostics[j].geweke_z}});
  }
  doc["rows"] = std::move(rows);
  return doc;
}

void chain_figures(RunContext& ctx, const McmcChain& chain) {
  const auto index_of = [&](const std::string& name) {
    const auto it = std::find(chain.param_names.begin(), chain.param_names.end(), name);
    return it == chain.param_names.end()
               ? std::size_t(-1)
               : static_cast<std::size_t>(it - chain.param_names.begin());
  };

  PlotSpec coef;
  coef.kind = PlotKind::Density;
  coef.title = "coefficient posteriors";
  coef.x_label = "log-sales effect";
  coef.y_label = "density";
  for (const char* name : {"intercept", "promo", "mean_log_sales"}) {
    const auto j = index_of(name);
    if (j != std::size_t(-1)) coef.series.push_back({name, {}, chain_column(chain, j, true)});
  }
  ctx.write_figure("coefficients_density.svg", coef);

  PlotSpec weekday;
  weekday.kind = PlotKind::Density;
  weekday.title = "weekday effect posteriors (vs Monday)";
  weekday.x_label = "log-sales effect";
  weekday.y_label = "density";
  for (std::size_t j = 0; j < chain.param_names.size(); ++j) {
    if (chain.param_names[j].rfind("wd_", 0) == 0) {
      weekday.series.push_back({chain.param_names[j], {}, chain_column(chain, j, true)});
    }
  }
  if (!weekday.series.empty()) ctx.write_figure("weekday_density.svg", weekday);

  const auto sigma = index_of("sigma2");
  if (sigma != std::size_t(-1)) {
    PlotSpec trace;
    trace.kind = PlotKind::Line;
    trace.title = "sigma2 trace (burn-in included)";
    trace.x_label = "iteration";
    trace.y_label = "sigma2";
    const auto draws = chain_column(chain, sigma, false);
    trace.series.push_back({"sigma2", index_axis(draws.size()), draws});
    ctx.write_figure("sigma2_trace.svg", trace);
  }
}

int cmd_bayes_gaussian(RunContext& ctx, const BayesFlags& f) {
  const auto panel = load_panel(f.in);
  const auto features = bayes_features(panel, f);
  RegressionPrior prior;
  prior.precision = f.precision;
  const auto chain = gibbs_gaussian_regression(features, prior,
                                               static_cast<std::size_t>(f.iters),
                                               static_cast<std::size_t>(f.burn_in), ctx.seed);
  ctx.write_text("model.json", emit_report(to_json(chain), ReportFormat::Json));
  ctx.write_report(chain_report("bayes-gaussian", chain, features.rows()));
  chain_figures(ctx, chain);
  ctx.log("sampled " + std::to_string(chain.draws.size()) + " iterations over " +
          std::to_string(chain.param_names.size()) + " parameters");
  std::cout << "gaussian chain done, " << features.rows() << " rows\n";
  return 0;
}

int cmd_bayes_student(RunContext& ctx, const BayesFlags& f) {
  const auto panel = load_panel(f.in);
  const auto features = bayes_features(panel, f);
  RegressionPrior prior;
  prior.precision = f.precision;
  const auto chain = fit_student_t_regression(features, prior,
                                              static_cast<std::size_t>(f.iters),
                                              static_cast<std::size_t>(f.burn_in), ctx.seed);
  ctx.write_text("model.json", emit_report(to_json(chain), ReportFormat::Json));
  ctx.write_report(chain_report("bayes-student", chain, features.rows()));
  chain_figures(ctx, chain);

  const auto nu_it = std::find(chain.param_names.begin(), chain.param_names.end(), "nu");
  if (nu_it != chain.param_names.end()) {
    const auto j = static_cast<std::size_t>(nu_it - chain.param_names.begin());
    PlotSpec density;
    density.kind = PlotKind::Density;
    density.title = "degrees-of-freedom posterior";
    density.x_label = "nu";
    density.y_label = "density";
    density.series.push_back({"nu", {}, chain_column(chain, j, true)});
    ctx.write_figure("nu_density.svg", density);
  }

  const int mls = features.column_index("mean_log_sales");
  if (mls >= 0) {
    PlotSpec scatter;
    scatter.kind = PlotKind::Scatter;
    scatter.title = "store mean log sales vs daily log sales";
    scatter.x_label = "mean log sales";
    scatter.y_label = "log sales";
    scatter.series.push_back(
        {"days", features.column(static_cast<std::size_t>(mls)), features.y});
    ctx.write_figure("mean_vs_log_sales.svg", scatter);
  }

  for (const auto& w : chain.warnings) ctx.log("warning: " + w);
  ctx.log("sampled " + std::to_string(chain.draws.size()) + " iterations over " +
          std::to_string(chain.param_names.size()) + " parameters");
  std::cout << "student-t chain done, " << features.rows() << " rows\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::string in;
  std::string format = "csv";
};

int cmd_report(RunContext& ctx, const ReportFlags& f) {
  const ReportFormat target = parse_report_format(f.format);
  std::ifstream in(f.in, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + f.in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const ReportFormat source = f.in.size() >= 4 && f.in.substr(f.in.size() - 4) == ".csv"
                                  ? ReportFormat::Csv
                                  : ReportFormat::Json;
  const Json doc = parse_report(buffer.str(), source);
  ctx.write_text("report." + f.format, emit_report(doc, target));
  ctx.log("converted " + f.in + " to " + f.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"storecast: retail sales forecasting, dependence modeling, and Bayesian "
               "regression on daily store panels"};
  app.option_defaults()->always_capture_default(true);
  app.set_config("--config", "",
                 "flat key=value flag file; a run's config.snapshot reproduces the run");
  app.require_subcommand(1);

  std::string out_root = "runs";
  bool deterministic = false;
  std::uint64_t seed = 42;
  app.add_option("--out", out_root, "output root directory")->envname("STORECAST_OUT");
  app.add_flag("--deterministic", deterministic,
               "write into --out directly instead of a timestamped subdirectory");
  app.add_option("--seed", seed, "random seed shared by every command");

  const auto make = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->configurable(true);
    sub->fallthrough();
    return sub;
  };

  SynthFlags synth;
  auto* synth_cmd = make("synth", "generate a synthetic multi-store sales panel");
  synth_cmd->add_option("--stores", synth.stores, "store count");
  synth_cmd->add_option("--days", synth.days, "calendar days per store");
  synth_cmd->add_option("--promo-rate", synth.promo_rate, "daily promo probability");
  synth_cmd->add_option("--promo-uplift", synth.promo_uplift, "promo effect in log space");
  synth_cmd->add_option("--ar-coeff", synth.ar_coeff, "AR(1) coefficient of the noise");
  synth_cmd->add_option("--noise-sd", synth.noise_sd, "innovation standard deviation");
  synth_cmd->add_option("--base-level", synth.base_level, "mean log-sales level");
  synth_cmd->add_option("--store-spread", synth.store_spread, "sd of per-store level offsets");
  synth_cmd->add_option("--start", synth.start, "first calendar date");
  synth_cmd->add_flag("--keep-sundays-open", synth.keep_sundays_open,
                      "do not close stores on Sundays");

  IngestFlags ingest;
  auto* ingest_cmd = make("ingest", "normalize a raw sales CSV into a tidy panel");
  ingest_cmd->add_option("--in", ingest.in, "raw CSV path")->required();
  ingest_cmd->add_option("--col-store", ingest.schema.store, "store id column");
  ingest_cmd->add_option("--col-date", ingest.schema.date, "date column");
  ingest_cmd->add_option("--col-sales", ingest.schema.sales, "sales column");
  ingest_cmd->add_option("--col-customers", ingest.schema.customers, "customers column");
  ingest_cmd->add_option("--col-open", ingest.schema.open, "open flag column");
  ingest_cmd->add_option("--col-promo", ingest.schema.promo, "promo flag column");
  ingest_cmd->add_flag("--dmy", ingest.schema.dmy_dates, "parse dates as D/M/Y");

  ForecastFlags forecast;
  auto* forecast_cmd = make("forecast", "fit one method and score the validation span");
  forecast_cmd->add_option("--in", forecast.in, "panel CSV path")->required();
  forecast_cmd->add_option("--store", forecast.store, "store id")->required();
  forecast_cmd->add_option("--method", forecast.method, "arima, lasso, gbt, or gbt_iid");
  add_split_flags(forecast_cmd, forecast.split);
  add_model_flags(forecast_cmd, forecast.model);

  EnsembleFlags blend;
  auto* blend_cmd = make("blend", "linear blend of ARIMA and boosted trees");
  blend_cmd->add_option("--in", blend.in, "panel CSV path")->required();
  blend_cmd->add_option("--store", blend.store, "store id")->required();
  add_split_flags(blend_cmd, blend.split);
  add_model_flags(blend_cmd, blend.model);

  EnsembleFlags stack;
  auto* stack_cmd = make("stack", "two-stage stacking of a linear model and boosted trees");
  stack_cmd->add_option("--in", stack.in, "panel CSV path")->required();
  stack_cmd->add_option("--store", stack.store, "store id")->required();
  add_split_flags(stack_cmd, stack.split);
  add_model_flags(stack_cmd, stack.model);

  BacktestFlags backtest_flags;
  auto* backtest_cmd = make("backtest", "score methods per store on a held-out span");
  backtest_cmd->add_option("--in", backtest_flags.in, "panel CSV path")->required();
  backtest_cmd->add_option("--store", backtest_flags.store, "single store id");
  backtest_cmd->add_option("--stores", backtest_flags.stores, "comma-separated store ids");
  backtest_cmd->add_flag("--all-stores", backtest_flags.all_stores,
                         "fan out over every store in the panel");
  backtest_cmd->add_option("--methods", backtest_flags.methods,
                           "comma-separated: arima, lasso, gbt, gbt_iid, blend, stack");
  add_split_flags(backtest_cmd, backtest_flags.split);
  add_model_flags(backtest_cmd, backtest_flags.model);

  CopulaFitFlags copula_fit;
  auto* copula_fit_cmd = make("copula-fit", "fit a bivariate copula with gamma marginals");
  copula_fit_cmd->add_option("--in", copula_fit.in, "panel CSV path")->required();
  copula_fit_cmd->add_option("--store-a", copula_fit.store_a, "first store id")->required();
  copula_fit_cmd->add_option("--store-b", copula_fit.store_b, "second store id")->required();
  copula_fit_cmd->add_option("--family", copula_fit.family, "auto, gaussian, or student");

  CopulaSampleFlags copula_sample;
  auto* copula_sample_cmd = make("copula-sample", "sample a fitted joint model and report VaR");
  copula_sample_cmd->add_option("--model", copula_sample.model, "model.json from copula-fit")
      ->required();
  copula_sample_cmd->add_option("--n", copula_sample.n, "draw count");
  copula_sample_cmd->add_option("--level", copula_sample.level, "VaR level in (0,1)");

  VineFitFlags vine_fit;
  auto* vine_fit_cmd = make("vine-fit", "fit a canonical vine over several stores");
  vine_fit_cmd->add_option("--in", vine_fit.in, "panel CSV path")->required();
  vine_fit_cmd->add_option("--stores", vine_fit.stores, "comma-separated store ids")
      ->required();
  vine_fit_cmd->add_option("--families", vine_fit.families,
                           "allowed pair families (gaussian,student)");

  BayesFlags bayes_gaussian;
  auto* bayes_gaussian_cmd = make("bayes-gaussian", "Gibbs regression on pooled store days");
  bayes_gaussian_cmd->add_option("--in", bayes_gaussian.in, "panel CSV path")->required();
  bayes_gaussian_cmd->add_option("--stores", bayes_gaussian.stores, "comma-separated store ids");
  bayes_gaussian_cmd->add_flag("--all-stores", bayes_gaussian.all_stores, "use every store");
  bayes_gaussian_cmd->add_option("--iters", bayes_gaussian.iters, "total iterations");
  bayes_gaussian_cmd->add_option("--burn-in", bayes_gaussian.burn_in, "discarded iterations");
  bayes_gaussian_cmd->add_option("--precision", bayes_gaussian.precision,
                                 "prior precision on the coefficients");

  BayesFlags bayes_student;
  auto* bayes_student_cmd =
      make("bayes-student", "Student-t regression with latent scales and sampled nu");
  bayes_student_cmd->add_option("--in", bayes_student.in, "panel CSV path")->required();
  bayes_student_cmd->add_option("--stores", bayes_student.stores, "comma-separated store ids");
  bayes_student_cmd->add_flag("--all-stores", bayes_student.all_stores, "use every store");
  bayes_student_cmd->add_option("--iters", bayes_student.iters, "total iterations");
  bayes_student_cmd->add_option("--burn-in", bayes_student.burn_in, "discarded iterations");
  bayes_student_cmd->add_option("--precision", bayes_student.precision,
                                "prior precision on the coefficients");

  ReportFlags report;
  auto* report_cmd = make("report", "re-emit a stored report in another format");
  report_cmd->add_option("--in", report.in, "report.json or report.csv path")->required();
  report_cmd->add_option("--format", report.format, "target format: json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  RunContext ctx;
  ctx.deterministic = deterministic;
  ctx.seed = seed;
  ctx.dir = deterministic ? fs::path(out_root)
                          : fs::path(out_root) / (active->get_name() + "-" + utc_stamp());

  try {
    fs::create_directories(ctx.dir);
    {
      std::ofstream snap(ctx.dir / "config.snapshot", std::ios::binary);
      if (!snap) raise(Errc::IoError, "cannot write " + (ctx.dir / "config.snapshot").string());
      snap << app.config_to_str(true, false);
    }
    ctx.log("command: " + active->get_name());
    ctx.log("kernels: " + std::string(kernels::backend_name(kernels::active_backend())));

    int code = 1;
    if (active == synth_cmd) code = cmd_synth(ctx, synth);
    if (active == ingest_cmd) code = cmd_ingest(ctx, ingest);
    if (active == forecast_cmd) code = cmd_forecast(ctx, forecast);
    if (active == blend_cmd) code = cmd_blend(ctx, blend);
    if (active == stack_cmd) code = cmd_stack(ctx, stack);
    if (active == backtest_cmd) code = cmd_backtest(ctx, backtest_flags);
    if (active == copula_fit_cmd) code = cmd_copula_fit(ctx, copula_fit);
    if (active == copula_sample_cmd) code = cmd_copula_sample(ctx, copula_sample);
    if (active == vine_fit_cmd) code = cmd_vine_fit(ctx, vine_fit);
    if (active == bayes_gaussian_cmd) code = cmd_bayes_gaussian(ctx, bayes_gaussian);
    if (active == bayes_student_cmd) code = cmd_bayes_student(ctx, bayes_student);
    if (active == report_cmd) code = cmd_report(ctx, report);

    ctx.finish();
    std::cout << "run: " << ctx.dir.string() << "\n";
    return code;
  } catch (const Error& e) {
    ctx.log(std::string("error: ") + e.what());
    ctx.finish();
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Errc::BadFlag || e.code() == Errc::UnknownCommand) {
      std::cerr << "\n" << app.help();
    }
    return 1;
  } catch (const std::exception& e) {
    ctx.log(std::string("error: ") + e.what());
    ctx.finish();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "storecast/arima.hpp"
#include "storecast/bayes.hpp"
#include "storecast/copulas.hpp"
#include "storecast/errors.hpp"
#include "storecast/gbt.hpp"
#include "storecast/lasso.hpp"
#include "storecast/model_io.hpp"
#include "storecast/report.hpp"
#include "storecast/rng.hpp"
#include "storecast/svg.hpp"
#include "storecast/vine.hpp"

using namespace storecast;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t total = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++total;
  }
  return total;
}

PlotSpec line_spec(std::size_t n_series, std::size_t points = 10) {
  PlotSpec spec;
  spec.kind = PlotKind::Line;
  spec.title = "demand";
  spec.x_label = "day";
  spec.y_label = "sales";
  for (std::size_t s = 0; s < n_series; ++s) {
    PlotSeries series;
    series.label = "series " + std::to_string(s);
    for (std::size_t i = 0; i < points; ++i) {
      series.x.push_back(static_cast<double>(i));
      series.y.push_back(std::sin(0.3 * static_cast<double>(i) + static_cast<double>(s)));
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

FeatureMatrix tiny_problem(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  m.column_names = {"x0", "x1"};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal();
    m.x.push_back(a);
    m.x.push_back(b);
    m.y.push_back(1.0 + 0.7 * a - 0.4 * b + 0.05 * rng.normal());
    m.row_dates.push_back(make_date(2015, 3, 1) + static_cast<int>(i));
  }
  return m;
}

SeriesView series_from(const std::vector<double>& values) {
  SeriesView s;
  s.store_id = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.dates.push_back(make_date(2013, 1, 1) + static_cast<int>(i));
  }
  s.log_sales = values;
  return s;
}

/// Serialize, parse back from the emitted bytes, serialize again: a loss-free
/// codec must reproduce the first document exactly.
template <typename Model, typename Reader>
Model string_round_trip(const Model& model, Reader reader) {
  const Json first = to_json(model);
  const std::string bytes = emit_report(first, ReportFormat::Json);
  const Model back = reader(parse_report(bytes, ReportFormat::Json));
  REQUIRE(to_json(back) == first);
  return back;
}

}  // namespace

// ---------------------------------------------------------------------------
// svg emission

TEST_CASE("line plots emit one polyline per series and identical bytes on rerun") {
  const auto spec = line_spec(3);
  const std::string svg = emit_svg(spec);
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  CHECK(count(svg, "<polyline ") == 3);
  CHECK(count(svg, "demand") == 1);
  CHECK(count(svg, ">day<") == 1);
  CHECK(count(svg, ">sales<") == 1);
  CHECK(emit_svg(spec) == svg);
}

TEST_CASE("the legend appears only when there is something to disambiguate") {
  const std::string one = emit_svg(line_spec(1));
  const std::string two = emit_svg(line_spec(2));
  CHECK(count(one, "series 0") == 0);
  CHECK(count(two, "series 0") == 1);
  CHECK(count(two, "series 1") == 1);
}

TEST_CASE("scatter plots emit one circle per point") {
  auto spec = line_spec(2, 17);
  spec.kind = PlotKind::Scatter;
  CHECK(count(emit_svg(spec), "<circle ") == 2 * 17);
}

TEST_CASE("histograms emit exactly the requested number of bars") {
  PlotSpec spec;
  spec.kind = PlotKind::Histogram;
  spec.bins = 12;
  // a gap in the middle leaves empty bins, which still get (zero-height) bars
  PlotSeries s;
  s.label = "draws";
  for (int i = 0; i < 40; ++i) s.y.push_back(i < 20 ? 0.1 * i : 8.0 + 0.1 * i);
  spec.series.push_back(s);

  // background + frame + 12 bars
  CHECK(count(emit_svg(spec), "<rect ") == 2 + 12);
  CHECK(count(emit_svg(spec), "<rect width=\"100%\"") == 1);

  spec.series.push_back(spec.series.front());
  spec.series.back().label = "more";
  CHECK(count(emit_svg(spec), "<rect ") == 2 + 2 * 12);
}

TEST_CASE("a constant sample still yields a drawable histogram") {
  PlotSpec spec;
  spec.kind = PlotKind::Histogram;
  spec.bins = 5;
  spec.series.push_back({"flat", {}, std::vector<double>(30, 4.25)});
  const std::string svg = emit_svg(spec);
  CHECK(count(svg, "<rect ") == 2 + 5);
}

TEST_CASE("density curves use a fixed 200-point grid") {
  PlotSpec spec;
  spec.kind = PlotKind::Density;
  Rng rng(7);
  PlotSeries s;
  s.label = "posterior";
  for (int i = 0; i < 500; ++i) s.y.push_back(rng.normal());
  spec.series.push_back(s);

  const std::string svg = emit_svg(spec);
  CHECK(count(svg, "<polyline ") == 1);
  const auto from = svg.find("points=\"");
  const auto to = svg.find('"', from + 8);
  CHECK(count(svg.substr(from, to - from), ",") == 200);
}

TEST_CASE("heatmaps paint every cell and reject malformed grids") {
  PlotSpec spec;
  spec.kind = PlotKind::Heatmap;
  spec.grid_rows = 3;
  spec.grid_cols = 4;
  for (int i = 0; i < 12; ++i) spec.grid.push_back(0.5 * i);
  CHECK(count(emit_svg(spec), "<rect ") == 2 + 12);

  PlotSpec wrong = spec;
  wrong.grid.pop_back();
  CHECK_THROWS_AS(emit_svg(wrong), Error);

  PlotSpec empty = spec;
  empty.grid.clear();
  CHECK_THROWS_AS(emit_svg(empty), Error);

  PlotSpec bad_range = spec;
  bad_range.grid_x1 = bad_range.grid_x0;
  CHECK_THROWS_AS(emit_svg(bad_range), Error);

  PlotSpec constant = spec;
  std::fill(constant.grid.begin(), constant.grid.end(), 3.0);
  CHECK(count(emit_svg(constant), "<rect ") == 2 + 12);
}

TEST_CASE("plot validation rejects empty, ragged, and non-finite input") {
  PlotSpec none;
  none.kind = PlotKind::Line;
  CHECK_THROWS_WITH_AS(emit_svg(none), doctest::Contains("no series"), Error);

  auto empty = line_spec(1);
  empty.series[0].x.clear();
  empty.series[0].y.clear();
  CHECK_THROWS_AS(emit_svg(empty), Error);

  auto ragged = line_spec(1);
  ragged.series[0].x.pop_back();
  CHECK_THROWS_WITH_AS(emit_svg(ragged), doctest::Contains("lengths differ"), Error);

  auto poisoned = line_spec(1);
  poisoned.series[0].y[3] = std::nan("");
  CHECK_THROWS_WITH_AS(emit_svg(poisoned), doctest::Contains("finite"), Error);

  PlotSpec hist;
  hist.kind = PlotKind::Histogram;
  hist.bins = 0;
  hist.series.push_back({"x", {}, {1.0, 2.0}});
  CHECK_THROWS_AS(emit_svg(hist), Error);
}

TEST_CASE("titles and labels are xml-escaped") {
  auto spec = line_spec(1);
  spec.title = "a<b & \"c\"";
  const std::string svg = emit_svg(spec);
  CHECK(count(svg, "a&lt;b &amp; &quot;c&quot;") == 1);
  CHECK(count(svg, "a<b") == 0);
}

TEST_CASE("axis ticks land on round numbers") {
  PlotSpec spec;
  spec.kind = PlotKind::Line;
  PlotSeries s;
  s.label = "ramp";
  for (int i = 0; i <= 100; ++i) {
    s.x.push_back(i);
    s.y.push_back(i);
  }
  spec.series.push_back(s);
  const std::string svg = emit_svg(spec);
  CHECK(count(svg, ">0<") >= 2);    // both axes
  CHECK(count(svg, ">50<") >= 2);
  CHECK(count(svg, ">100<") >= 2);
}

// ---------------------------------------------------------------------------
// report emission and parsing

TEST_CASE("json reports are pretty-printed with sorted keys") {
  const Json doc{{"zeta", 1}, {"alpha", 2}};
  const std::string bytes = emit_report(doc, ReportFormat::Json);
  CHECK(bytes.find("alpha") < bytes.find("zeta"));
  CHECK(bytes.back() == '\n');
  CHECK(parse_report(bytes, ReportFormat::Json) == doc);
}

TEST_CASE("row-shaped documents round trip through table csv") {
  Json doc{{"command", "backtest"}, {"seed", 42}};
  doc["rows"] = Json::array({Json{{"store", 1}, {"rmse", 0.125}, {"method", "arima"}},
                             Json{{"store", 2}, {"method", "gbt"}, {"skipped", true}}});
  const std::string bytes = emit_report(doc, ReportFormat::Csv);
  CHECK(bytes.rfind("# report mode=table\n", 0) == 0);
  CHECK(count(bytes, "# meta command = \"backtest\"") == 1);
  // the union header is sorted; row 2 leaves the rmse cell empty
  CHECK(count(bytes, "method,rmse,skipped,store") == 1);
  CHECK(parse_report(bytes, ReportFormat::Csv) == doc);
}

TEST_CASE("nested documents round trip through flat csv") {
  Json doc{{"command", "copula-fit"},
           {"params", Json{{"rho", 0.5}, {"nu", 5.0}}},
           {"taus", Json::array({0.1, -0.2, 0.3})},
           {"empty_list", Json::array()},
           {"empty_obj", Json::object()}};
  const std::string bytes = emit_report(doc, ReportFormat::Csv);
  CHECK(bytes.rfind("# report mode=flat\n", 0) == 0);
  CHECK(count(bytes, "params.rho,0.5") == 1);
  CHECK(count(bytes, "taus.1,-0.2") == 1);
  CHECK(count(bytes, "empty_list,[]") == 1);
  CHECK(parse_report(bytes, ReportFormat::Csv) == doc);
}

TEST_CASE("documents that are not row-shaped fall back to flat csv") {
  Json nested_sibling{{"rows", Json::array({Json{{"a", 1}}})},
                      {"extra", Json{{"deep", 1}}}};
  CHECK(emit_report(nested_sibling, ReportFormat::Csv).rfind("# report mode=flat", 0) == 0);

  Json nested_cell{{"rows", Json::array({Json{{"a", Json::array({1, 2})}}})}};
  CHECK(emit_report(nested_cell, ReportFormat::Csv).rfind("# report mode=flat", 0) == 0);

  Json no_rows{{"a", 1}};
  CHECK(emit_report(no_rows, ReportFormat::Csv).rfind("# report mode=flat", 0) == 0);
}

TEST_CASE("csv quoting survives commas, quotes, and newlines") {
  Json doc{{"note", "a,b\"c\nd"}, {"rows", Json::array({Json{{"k", "x,y"}}})}};
  const std::string bytes = emit_report(doc, ReportFormat::Csv);
  CHECK(parse_report(bytes, ReportFormat::Csv) == doc);
}

TEST_CASE("doubles survive a csv round trip exactly") {
  Json doc{{"a", 0.1 + 0.2},
           {"b", 1e-308},
           {"c", -123456.789012345678},
           {"d", 3.141592653589793},
           {"rows", Json::array({Json{{"v", 2.2250738585072014e-308}}})}};
  const Json back = parse_report(emit_report(doc, ReportFormat::Csv), ReportFormat::Csv);
  for (const char* key : {"a", "b", "c", "d"}) {
    CHECK(back.at(key).get<double>() == doc.at(key).get<double>());
  }
  CHECK(back.at("rows")[0].at("v").get<double>() == doc.at("rows")[0].at("v").get<double>());
}

TEST_CASE("a scalar document round trips through flat csv") {
  const Json doc = 42;
  CHECK(parse_report(emit_report(doc, ReportFormat::Csv), ReportFormat::Csv) == doc);
}

TEST_CASE("malformed reports are rejected with MalformedRow") {
  const auto code = [](const std::string& bytes, ReportFormat format) {
    try {
      parse_report(bytes, format);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  CHECK(code("no mode line\na,b\n", ReportFormat::Csv) == Errc::MalformedRow);
  CHECK(code("", ReportFormat::Csv) == Errc::MalformedRow);
  CHECK(code("# report mode=table\na,b\n1\n", ReportFormat::Csv) == Errc::MalformedRow);
  CHECK(code("# report mode=table\na\n\"unterminated\n", ReportFormat::Csv) ==
        Errc::MalformedRow);
  CHECK(code("# report mode=table\na\nnot json\n", ReportFormat::Csv) == Errc::MalformedRow);
  CHECK(code("# report mode=flat\nwrong,header\n", ReportFormat::Csv) == Errc::MalformedRow);
  CHECK(code("{ broken json", ReportFormat::Json) == Errc::MalformedRow);
}

TEST_CASE("report format names parse strictly") {
  CHECK(parse_report_format("json") == ReportFormat::Json);
  CHECK(parse_report_format("csv") == ReportFormat::Csv);
  CHECK_THROWS_WITH_AS(parse_report_format("xml"), doctest::Contains("unknown report format"),
                       Error);
}

// ---------------------------------------------------------------------------
// model serialization

TEST_CASE("a fitted arima model survives serialization bit for bit") {
  Rng rng(11);
  std::vector<double> y(240);
  y[0] = rng.normal();
  for (std::size_t t = 1; t < y.size(); ++t) y[t] = 0.6 * y[t - 1] + 0.1 * rng.normal();
  const auto model = fit_arima(series_from(y), 3, 1, 3);
  const auto back = string_round_trip(model, arima_from_json);

  const auto ahead = forecast_arima(model, 14);
  const auto ahead_back = forecast_arima(back, 14);
  for (std::size_t i = 0; i < ahead.size(); ++i) CHECK(ahead[i] == ahead_back[i]);
}

TEST_CASE("a fitted lasso model survives serialization bit for bit") {
  const auto features = tiny_problem(120, 3);
  const auto model = fit_lasso(features, 0.01);
  const auto back = string_round_trip(model, lasso_from_json);
  const auto pred = model.predict(features);
  const auto pred_back = back.predict(features);
  for (std::size_t i = 0; i < pred.size(); ++i) CHECK(pred[i] == pred_back[i]);
}

TEST_CASE("a fitted gbt model survives serialization bit for bit") {
  const auto features = tiny_problem(150, 4);
  GbtParams params;
  params.n_trees = 25;
  params.max_depth = 3;
  params.seed = 5;
  const auto model = fit_gbt(features, params);
  const auto back = string_round_trip(model, gbt_from_json);
  const auto pred = model.predict(features);
  const auto pred_back = back.predict(features);
  for (std::size_t i = 0; i < pred.size(); ++i) CHECK(pred[i] == pred_back[i]);
}

TEST_CASE("joint copula models round trip with family names intact") {
  JointModel model;
  model.family = CopulaFamily::Student;
  model.rho = 0.47;
  model.nu = 5.5;
  model.loglik = -12.25;
  model.marginals = {{2.5, 310.0}, {3.25, 190.5}};
  string_round_trip(model, joint_model_from_json);

  model.family = CopulaFamily::Independence;
  const auto back = string_round_trip(model, joint_model_from_json);
  CHECK(back.family == CopulaFamily::Independence);
}

TEST_CASE("a fitted cvine spec round trips including conditioned sets") {
  Rng rng(23);
  std::vector<std::vector<double>> cols(3, std::vector<double>(150));
  for (std::size_t i = 0; i < 150; ++i) {
    const double z = rng.normal();
    cols[0][i] = z + 0.4 * rng.normal();
    cols[1][i] = z + 0.6 * rng.normal();
    cols[2][i] = rng.normal();
  }
  const auto u = pseudo_observations(cols);
  const auto spec = fit_cvine(u);
  const auto back = string_round_trip(spec, cvine_spec_from_json);
  REQUIRE(back.order == spec.order);
  REQUIRE(back.trees.size() == spec.trees.size());
  CHECK(back.trees[1][0].conditioned_on == spec.trees[1][0].conditioned_on);
}

TEST_CASE("an mcmc chain round trips with every draw intact") {
  const auto features = tiny_problem(60, 31);
  const auto chain = gibbs_gaussian_regression(features, {}, 80, 20, 17);
  const auto back = string_round_trip(chain, chain_from_json);
  CHECK(back.draws == chain.draws);
  CHECK(back.burn_in == chain.burn_in);
  CHECK(back.param_names == chain.param_names);
}

TEST_CASE("schema tags keep model kinds apart") {
  const auto features = tiny_problem(80, 13);
  const Json lasso_doc = to_json(fit_lasso(features, 0.0));
  CHECK_THROWS_WITH_AS(arima_from_json(lasso_doc), doctest::Contains("storecast/arima/v1"),
                       Error);
  CHECK_THROWS_AS(gbt_from_json(lasso_doc), Error);
  CHECK_THROWS_AS(chain_from_json(Json{{"schema", "storecast/chain/v2"}}), Error);
  CHECK_THROWS_AS(joint_model_from_json(Json::array({1, 2})), Error);
}

TEST_CASE("missing and ill-typed fields are malformed, not kind mismatches") {
  const auto probe = [](const Json& doc) {
    try {
      arima_from_json(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  Rng rng(3);
  std::vector<double> y(120);
  for (auto& v : y) v = rng.normal();
  Json doc = to_json(fit_arima(series_from(y), 1, 0, 1));

  Json missing = doc;
  missing.erase("phi");
  CHECK(probe(missing) == Errc::MalformedRow);

  Json wrong_type = doc;
  wrong_type["sigma2"] = "not a number";
  CHECK(probe(wrong_type) == Errc::MalformedRow);

  Json bad_nodes = to_json(GbtModel{});
  bad_nodes["trees"] = Json::array({Json::array({Json::array({1, 2, 3})})});
  CHECK_THROWS_WITH_AS(gbt_from_json(bad_nodes), doctest::Contains("five fields"), Error);
}

TEST_CASE("copula family names parse strictly") {
  CHECK(copula_family_from_name("gaussian") == CopulaFamily::Gaussian);
  CHECK(copula_family_from_name("student") == CopulaFamily::Student);
  CHECK(copula_family_from_name("independence") == CopulaFamily::Independence);
  CHECK_THROWS_AS(copula_family_from_name("clayton"), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "storecast/features.hpp"

using namespace storecast;

namespace {

// 2015-01-05 was a Monday.
const Date kMonday = make_date(2015, 1, 5);

SeriesView make_series(std::vector<double> values, Date start = kMonday) {
  SeriesView s;
  s.store_id = 1;
  for (std::size_t i = 0; i < values.size(); ++i) s.dates.push_back(start + static_cast<int>(i));
  s.log_sales = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("build_ts_features shifts lags against the target") {
  const auto s = make_series({1.0, 2.0, 3.0, 4.0});
  FeatureSpec spec;
  spec.lags = {1};
  spec.include_promo = false;
  const auto m = build_ts_features(s, {}, spec);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 1);
  CHECK(m.column_names[0] == "lag_1");
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(1, 0) == 2.0);
  CHECK(m.at(2, 0) == 3.0);
  CHECK(m.y == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(m.row_dates[0] == kMonday + 1);
}

TEST_CASE("build_ts_features row count is length minus max lag") {
  const auto s = make_series({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  FeatureSpec spec;
  spec.lags = {1, 3};
  spec.include_promo = false;
  const auto m = build_ts_features(s, {}, spec);
  CHECK(m.rows() == 7);
  CHECK(m.column_index("lag_3") == 1);
  // lag columns line up: lag_3 at row i equals lag_1 at row i-2
  for (std::size_t i = 2; i < m.rows(); ++i) {
    CHECK(m.at(i, 1) == m.at(i - 2, 0));
  }
}

TEST_CASE("build_ts_features rejects lags longer than the series") {
  const auto s = make_series({1, 2, 3, 4, 5});
  FeatureSpec spec;
  spec.lags = {1, 7};
  try {
    build_ts_features(s, {}, spec);
    FAIL("expected LagExceedsLength");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LagExceedsLength);
  }
}

TEST_CASE("weekday one-hot marks exactly one level off the reference") {
  const auto s = make_series({1.0, 2.0, 3.0});  // Mon, Tue, Wed
  FeatureSpec spec;
  spec.lags = {1};
  spec.include_promo = false;
  spec.weekday = true;
  const auto m = build_ts_features(s, {}, spec);
  REQUIRE(m.rows() == 2);  // Tue, Wed rows
  const int tue = m.column_index("wd_tue");
  const int wed = m.column_index("wd_wed");
  REQUIRE(tue >= 0);
  REQUIRE(wed >= 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double ones = 0.0;
    for (std::size_t j = 1; j < m.cols(); ++j) ones += m.at(i, j);
    CHECK(ones == 1.0);
  }
  CHECK(m.at(0, static_cast<std::size_t>(tue)) == 1.0);
  CHECK(m.at(1, static_cast<std::size_t>(wed)) == 1.0);

  // a Monday row encodes as the all-zero reference level
  const auto s2 = make_series({1.0, 2.0}, kMonday - 1);  // Sun, Mon
  const auto m2 = build_ts_features(s2, {}, spec);
  double ones = 0.0;
  for (std::size_t j = 1; j < m2.cols(); ++j) ones += m2.at(0, j);
  CHECK(ones == 0.0);
}

TEST_CASE("promo column is aligned with the retained rows") {
  const auto s = make_series({1.0, 2.0, 3.0, 4.0});
  FeatureSpec spec;
  spec.lags = {2};
  const auto m = build_ts_features(s, {0, 1, 0, 1}, spec);
  const int promo = m.column_index("promo");
  REQUIRE(promo >= 0);
  CHECK(m.at(0, static_cast<std::size_t>(promo)) == 0.0);
  CHECK(m.at(1, static_cast<std::size_t>(promo)) == 1.0);
}

TEST_CASE("store_mean_log_sales") {
  std::vector<SalesRecord> recs = {
      {1, make_date(2015, 1, 1), std::exp(1.0), 1, false, true},
      {1, make_date(2015, 1, 2), std::exp(3.0), 1, false, true},
      {1, make_date(2015, 1, 3), 0.0, 0, false, false},
  };
  const auto panel = SalesPanel::from_records(recs);
  const Date cutoff = make_date(2015, 1, 31);
  CHECK(store_mean_log_sales(panel, 1, cutoff) == doctest::Approx(2.0).epsilon(1e-12));
  // only rows up to the cutoff count
  CHECK(store_mean_log_sales(panel, 1, make_date(2015, 1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("store_mean_log_sales matches a reverse-order accumulation") {
  const auto panel = synthesize_panel(17, 1, 400);
  const Date cutoff = panel.max_date();
  const double mean = store_mean_log_sales(panel, 1, cutoff);

  double total = 0.0;
  std::size_t count = 0;
  const auto rows = panel.store_records(1);
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!it->open || it->sales <= 0.0) continue;
    total += std::log(it->sales);
    ++count;
  }
  CHECK(mean == doctest::Approx(total / static_cast<double>(count)).epsilon(1e-12));
}

TEST_CASE("build_iid_features") {
  // store 1 trades at e, store 2 at e^2, every day
  std::vector<SalesRecord> recs;
  for (int i = 0; i < 10; ++i) {
    recs.push_back({1, make_date(2015, 3, 1) + i, std::exp(1.0), 1, i % 2 == 0, true});
    recs.push_back({2, make_date(2015, 3, 1) + i, std::exp(2.0), 1, false, true});
  }
  const auto panel = SalesPanel::from_records(recs);
  const Date cutoff = make_date(2015, 3, 7);
  FeatureSpec spec;
  spec.framing = Framing::IID;

  SUBCASE("mean column is constant per store and uses the train window") {
    const auto m = build_iid_features(panel, {1, 2}, spec, cutoff);
    REQUIRE(m.rows() == 20);
    const int mls = m.column_index("mean_log_sales");
    REQUIRE(mls >= 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double want = m.y[i] == doctest::Approx(1.0) ? 1.0 : 2.0;
      CHECK(m.at(i, static_cast<std::size_t>(mls)) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  SUBCASE("rows after the cutoff never feed the store mean") {
    auto poisoned = recs;
    for (auto& r : poisoned) {
      if (r.date > cutoff) r.sales = 1e6;  // would move the mean if leaked
    }
    const auto m = build_iid_features(panel, {1}, spec, cutoff);
    const auto p = build_iid_features(SalesPanel::from_records(poisoned), {1}, spec, cutoff);
    const int mls = m.column_index("mean_log_sales");
    REQUIRE(mls >= 0);
    CHECK(m.at(0, static_cast<std::size_t>(mls)) ==
          p.at(0, static_cast<std::size_t>(mls)));
  }

  SUBCASE("store with no usable rows before the cutoff") {
    try {
      build_iid_features(panel, {1}, spec, make_date(2015, 2, 1));
      FAIL("expected EmptySelection");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptySelection);
      CHECK(std::string(e.what()).find("store 1") != std::string::npos);
    }
  }

  SUBCASE("calendar block is always present") {
    const auto m = build_iid_features(panel, {1}, spec, cutoff);
    CHECK(m.column_index("wd_tue") >= 0);
    CHECK(m.column_index("m_feb") >= 0);
    CHECK(m.column_index("monthday") >= 0);
    CHECK(m.column_index("promo") >= 0);
    m.validate();
  }
}

TEST_CASE("feature matrix validation rejects bad shapes") {
  FeatureMatrix m;
  m.column_names = {"a", "a"};
  m.x = {1.0, 2.0};
  m.y = {1.0};
  m.row_dates = {kMonday};
  CHECK_THROWS_AS(m.validate(), Error);
}

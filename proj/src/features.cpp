#include "storecast/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "storecast/csv.hpp"
#include "storecast/kernels.hpp"

namespace storecast {

std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
  return out;
}

int FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (column_names[j] == name) return static_cast<int>(j);
  }
  return -1;
}

void FeatureMatrix::validate() const {
  if (rows() == 0) raise(Errc::EmptyInput, "feature matrix has no rows");
  std::set<std::string> names(column_names.begin(), column_names.end());
  if (names.size() != column_names.size()) {
    raise(Errc::ColumnMismatch, "duplicate column names");
  }
  if (x.size() != rows() * cols() || row_dates.size() != rows()) {
    raise(Errc::LengthMismatch, "feature matrix shape mismatch");
  }
  for (double v : x) {
    if (!std::isfinite(v)) raise(Errc::DegenerateData, "non-finite feature entry");
  }
  for (double v : y) {
    if (!std::isfinite(v)) raise(Errc::DegenerateData, "non-finite target entry");
  }
}

void save_feature_csv(const FeatureMatrix& m, std::ostream& out) {
  for (const auto& name : m.column_names) out << name << ',';
  out << "target\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << format_double(m.at(i, j)) << ',';
    out << format_double(m.y[i]) << '\n';
  }
}

namespace {

// Weekday and month one-hots drop their reference level (Monday, January)
// so linear models stay full-rank.
const char* kWeekdayNames[6] = {"wd_tue", "wd_wed", "wd_thu",
                                "wd_fri", "wd_sat", "wd_sun"};
const char* kMonthNames[11] = {"m_feb", "m_mar", "m_apr", "m_may", "m_jun", "m_jul",
                               "m_aug", "m_sep", "m_oct", "m_nov", "m_dec"};

void append_calendar_names(const FeatureSpec& spec, std::vector<std::string>& names) {
  if (spec.weekday) {
    for (const char* n : kWeekdayNames) names.emplace_back(n);
  }
  if (spec.month) {
    for (const char* n : kMonthNames) names.emplace_back(n);
  }
  if (spec.monthday) names.emplace_back("monthday");
}

void append_calendar_values(const FeatureSpec& spec, Date date, std::vector<double>& row) {
  if (spec.weekday) {
    const int wd = weekday(date);
    for (int k = 1; k <= 6; ++k) row.push_back(wd == k ? 1.0 : 0.0);
  }
  if (spec.month) {
    const int m = month_of(date);
    for (int k = 2; k <= 12; ++k) row.push_back(m == k ? 1.0 : 0.0);
  }
  if (spec.monthday) row.push_back(static_cast<double>(monthday_of(date)));
}

}  // namespace

FeatureMatrix build_ts_features(const SeriesView& series,
                                const std::vector<std::uint8_t>& promo,
                                const FeatureSpec& spec) {
  if (spec.framing != Framing::TS) raise(Errc::KindMismatch, "spec framing is not TS");
  if (spec.lags.empty()) raise(Errc::EmptyInput, "TS framing requires lags");
  std::vector<int> lags = spec.lags;
  std::sort(lags.begin(), lags.end());
  const int max_lag = lags.back();
  if (lags.front() < 1) raise(Errc::EmptyInput, "lags must be positive");
  if (static_cast<std::size_t>(max_lag) >= series.size()) {
    raise(Errc::LagExceedsLength, "max lag " + std::to_string(max_lag) +
                                      " >= series length " + std::to_string(series.size()));
  }
  if (spec.include_promo && promo.size() != series.size()) {
    raise(Errc::LengthMismatch, "promo flags not aligned with series");
  }

  FeatureMatrix m;
  for (int k : lags) m.column_names.push_back("lag_" + std::to_string(k));
  append_calendar_names(spec, m.column_names);
  if (spec.include_promo) m.column_names.emplace_back("promo");

  std::vector<double> row;
  for (std::size_t t = static_cast<std::size_t>(max_lag); t < series.size(); ++t) {
    row.clear();
    for (int k : lags) row.push_back(series.log_sales[t - static_cast<std::size_t>(k)]);
    append_calendar_values(spec, series.dates[t], row);
    if (spec.include_promo) row.push_back(promo[t] ? 1.0 : 0.0);
    m.x.insert(m.x.end(), row.begin(), row.end());
    m.y.push_back(series.log_sales[t]);
    m.row_dates.push_back(series.dates[t]);
  }
  m.validate();
  return m;
}

FeatureMatrix build_iid_features(const SalesPanel& panel, const std::vector<int>& stores,
                                 const FeatureSpec& spec, Date train_cutoff) {
  if (spec.framing != Framing::IID) raise(Errc::KindMismatch, "spec framing is not IID");
  if (stores.empty()) raise(Errc::EmptySelection, "no stores selected");

  FeatureMatrix m;
  FeatureSpec calendar = spec;
  // IID framing always carries the calendar block
  calendar.weekday = true;
  calendar.month = true;
  calendar.monthday = true;
  append_calendar_names(calendar, m.column_names);
  if (spec.include_promo) m.column_names.emplace_back("promo");
  m.column_names.emplace_back("mean_log_sales");

  std::vector<double> row;
  for (int store : stores) {
    const double mean_ls = store_mean_log_sales(panel, store, train_cutoff);
    for (const auto& rec : panel.store_records(store)) {
      if (!rec.open || rec.sales <= 0.0) continue;
      row.clear();
      append_calendar_values(calendar, rec.date, row);
      if (spec.include_promo) row.push_back(rec.promo ? 1.0 : 0.0);
      row.push_back(mean_ls);
      m.x.insert(m.x.end(), row.begin(), row.end());
      m.y.push_back(std::log(rec.sales));
      m.row_dates.push_back(rec.date);
    }
  }
  if (m.y.empty()) raise(Errc::EmptySelection, "selected stores have no usable rows");
  m.validate();
  return m;
}

double store_mean_log_sales(const SalesPanel& panel, int store_id, Date cutoff) {
  std::vector<double> logs;
  for (const auto& rec : panel.store_records(store_id)) {
    if (rec.date > cutoff || !rec.open || rec.sales <= 0.0) continue;
    logs.push_back(std::log(rec.sales));
  }
  if (logs.empty()) {
    raise(Errc::EmptySelection, "store " + std::to_string(store_id) +
                                    " has no qualifying rows on or before " +
                                    date_to_iso(cutoff));
  }
  return kernels::sum(logs.data(), logs.size()) / static_cast<double>(logs.size());
}

std::pair<FeatureMatrix, FeatureMatrix> split_by_date(const FeatureMatrix& m, Date cutoff) {
  FeatureMatrix before, after;
  before.column_names = m.column_names;
  after.column_names = m.column_names;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    FeatureMatrix& dst = m.row_dates[i] <= cutoff ? before : after;
    const double* row = m.row(i);
    dst.x.insert(dst.x.end(), row, row + m.cols());
    dst.y.push_back(m.y[i]);
    dst.row_dates.push_back(m.row_dates[i]);
  }
  return {std::move(before), std::move(after)};
}

}  // namespace storecast

#include "storecast/panel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "storecast/csv.hpp"
#include "storecast/rng.hpp"

namespace storecast {

SalesPanel SalesPanel::from_records(std::vector<SalesRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const SalesRecord& a, const SalesRecord& b) {
                     if (a.store_id != b.store_id) return a.store_id < b.store_id;
                     return a.date < b.date;
                   });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].store_id == records[i - 1].store_id &&
        records[i].date == records[i - 1].date) {
      raise(Errc::DuplicateKey, "store " + std::to_string(records[i].store_id) +
                                    ", date " + date_to_iso(records[i].date));
    }
  }
  SalesPanel panel;
  panel.records_ = std::move(records);
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= panel.records_.size(); ++i) {
    if (i == panel.records_.size() ||
        (i > begin && panel.records_[i].store_id != panel.records_[begin].store_id)) {
      if (i > begin) panel.index_[panel.records_[begin].store_id] = {begin, i};
      begin = i;
    }
  }
  return panel;
}

std::vector<int> SalesPanel::store_ids() const {
  std::vector<int> ids;
  ids.reserve(index_.size());
  for (const auto& [store, range] : index_) ids.push_back(store);
  return ids;
}

std::span<const SalesRecord> SalesPanel::store_records(int store_id) const {
  auto it = index_.find(store_id);
  if (it == index_.end()) {
    raise(Errc::UnknownStore, "store " + std::to_string(store_id));
  }
  return std::span<const SalesRecord>(records_.data() + it->second.first,
                                      it->second.second - it->second.first);
}

Date SalesPanel::min_date() const {
  if (records_.empty()) raise(Errc::EmptyInput, "empty panel");
  Date d = records_.front().date;
  for (const auto& r : records_) d = std::min(d, r.date);
  return d;
}

Date SalesPanel::max_date() const {
  if (records_.empty()) raise(Errc::EmptyInput, "empty panel");
  Date d = records_.front().date;
  for (const auto& r : records_) d = std::max(d, r.date);
  return d;
}

namespace {

bool parse_bool(const std::string& s, bool& out) {
  if (s == "0" || s == "false" || s == "FALSE" || s == "False") {
    out = false;
    return true;
  }
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") {
    out = true;
    return true;
  }
  return false;
}

}  // namespace

SalesPanel load_sales_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) raise(Errc::EmptyInput, "no header row");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    raise(Errc::MissingColumn, name);
  };
  const std::size_t c_store = column(schema.store);
  const std::size_t c_date = column(schema.date);
  const std::size_t c_sales = column(schema.sales);
  const std::size_t c_customers = column(schema.customers);
  const std::size_t c_open = column(schema.open);
  const std::size_t c_promo = column(schema.promo);

  std::vector<SalesRecord> records;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    auto fail = [&](const std::string& what) {
      raise(Errc::MalformedRow, "line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() < header.size()) fail("expected " + std::to_string(header.size()) + " fields");
    SalesRecord rec;
    long store;
    if (!parse_int(fields[c_store], store) || store <= 0) fail("bad store '" + fields[c_store] + "'");
    rec.store_id = static_cast<int>(store);
    try {
      rec.date = parse_date(fields[c_date], schema.dmy_dates);
    } catch (const Error&) {
      fail("bad date '" + fields[c_date] + "'");
    }
    if (!parse_double(fields[c_sales], rec.sales) || !(rec.sales >= 0.0)) {
      fail("bad sales '" + fields[c_sales] + "'");
    }
    if (!parse_double(fields[c_customers], rec.customers) || !(rec.customers >= 0.0)) {
      fail("bad customers '" + fields[c_customers] + "'");
    }
    if (!parse_bool(fields[c_open], rec.open)) fail("bad open flag '" + fields[c_open] + "'");
    if (!parse_bool(fields[c_promo], rec.promo)) fail("bad promo flag '" + fields[c_promo] + "'");
    records.push_back(rec);
  }
  return SalesPanel::from_records(std::move(records));
}

void save_panel_csv(const SalesPanel& panel, std::ostream& out) {
  out << "Store,Date,Sales,Customers,Open,Promo\n";
  for (const auto& r : panel.records()) {
    out << r.store_id << ',' << date_to_iso(r.date) << ',' << format_double(r.sales)
        << ',' << format_double(r.customers) << ',' << (r.open ? 1 : 0) << ','
        << (r.promo ? 1 : 0) << '\n';
  }
}

namespace {

// Shared drop rule: a row enters the log series iff the store was open and
// sales are strictly positive (ln of zero is undefined).
bool keep_row(const SalesRecord& r) { return r.open && r.sales > 0.0; }

}  // namespace

SeriesView log_series(const SalesPanel& panel, int store_id) {
  const auto rows = panel.store_records(store_id);
  SeriesView out;
  out.store_id = store_id;
  for (const auto& r : rows) {
    if (!keep_row(r)) continue;
    out.dates.push_back(r.date);
    out.log_sales.push_back(std::log(r.sales));
  }
  if (out.dates.empty()) {
    raise(Errc::EmptySeries, "store " + std::to_string(store_id) +
                                 " has no open, positive-sales rows");
  }
  return out;
}

std::vector<std::uint8_t> promo_flags(const SalesPanel& panel, int store_id) {
  const auto rows = panel.store_records(store_id);
  std::vector<std::uint8_t> out;
  for (const auto& r : rows) {
    if (keep_row(r)) out.push_back(r.promo ? 1 : 0);
  }
  return out;
}

std::pair<SeriesView, SeriesView> train_validation_split(const SeriesView& series,
                                                         const SplitSpec& spec) {
  if (series.size() < 2) raise(Errc::SpanTooShort, "series has fewer than 2 points");
  const Date first = series.dates.front();
  const Date last = series.dates.back();
  Date cutoff;
  if (spec.cutoff_date) {
    cutoff = *spec.cutoff_date;
  } else {
    if (spec.validation_months <= 0) raise(Errc::SpanTooShort, "validation_months must be positive");
    cutoff = shift_months(last, -spec.validation_months);
  }
  if (!(cutoff > first && cutoff < last)) {
    raise(Errc::SpanTooShort, "cutoff " + date_to_iso(cutoff) +
                                  " not strictly inside [" + date_to_iso(first) +
                                  ", " + date_to_iso(last) + "]");
  }
  SeriesView train, validation;
  train.store_id = validation.store_id = series.store_id;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.dates[i] <= cutoff) {
      train.dates.push_back(series.dates[i]);
      train.log_sales.push_back(series.log_sales[i]);
    } else {
      validation.dates.push_back(series.dates[i]);
      validation.log_sales.push_back(series.log_sales[i]);
    }
  }
  return {std::move(train), std::move(validation)};
}

SalesPanel synthesize_panel(std::uint64_t seed, int n_stores, int n_days,
                            const GenParams& gen) {
  if (n_stores < 1 || n_days < 14) {
    raise(Errc::EmptyInput, "need n_stores >= 1 and n_days >= 14");
  }
  if (!(std::fabs(gen.ar_coeff) < 1.0)) {
    raise(Errc::DegenerateData, "AR(1) coefficient must satisfy |c| < 1");
  }
  std::vector<SalesRecord> records;
  records.reserve(static_cast<std::size_t>(n_stores) * n_days);
  for (int s = 1; s <= n_stores; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const double level = gen.base_level + gen.store_spread * rng.normal();
    // start the AR(1) noise at its stationary distribution
    double ar_state =
        gen.noise_sd / std::sqrt(1.0 - gen.ar_coeff * gen.ar_coeff) * rng.normal();
    for (int d = 0; d < n_days; ++d) {
      const Date date = gen.start_date + d;
      const int wd = weekday(date);
      const bool promo = rng.uniform() < gen.promo_rate;
      ar_state = gen.ar_coeff * ar_state + gen.noise_sd * rng.normal();
      SalesRecord rec;
      rec.store_id = s;
      rec.date = date;
      rec.promo = promo;
      rec.open = !(gen.close_sundays && wd == 6);
      if (rec.open) {
        const double log_sales = level + gen.weekday_effect[static_cast<std::size_t>(wd)] +
                                 (promo ? gen.promo_uplift : 0.0) + ar_state;
        rec.sales = std::exp(log_sales);
        rec.customers = std::round(std::exp(0.8 * log_sales + 1.0));
      } else {
        rec.sales = 0.0;
        rec.customers = 0.0;
      }
      records.push_back(rec);
    }
  }
  return SalesPanel::from_records(std::move(records));
}

}  // namespace storecast

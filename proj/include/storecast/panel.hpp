#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storecast/dates.hpp"
#include "storecast/errors.hpp"

namespace storecast {

struct SalesRecord {
  int store_id = 0;        // positive
  Date date = 0;
  double sales = 0.0;      // currency/day, >= 0
  double customers = 0.0;  // count, >= 0
  bool promo = false;
  bool open = true;
};

/// Tidy multi-store daily sales panel. Records are kept sorted by
/// (store_id, date); (store_id, date) pairs are unique. Immutable after
/// construction, safe to share across threads.
class SalesPanel {
 public:
  static SalesPanel from_records(std::vector<SalesRecord> records);

  const std::vector<SalesRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  std::vector<int> store_ids() const;
  bool has_store(int store_id) const { return index_.count(store_id) != 0; }
  std::span<const SalesRecord> store_records(int store_id) const;

  Date min_date() const;
  Date max_date() const;

 private:
  std::vector<SalesRecord> records_;
  std::map<int, std::pair<std::size_t, std::size_t>> index_;  // store -> [begin, end)
};

/// Column-name remapping for CSV ingest. Defaults match the Rossmann layout.
struct CsvSchema {
  std::string store = "Store";
  std::string date = "Date";
  std::string sales = "Sales";
  std::string customers = "Customers";
  std::string open = "Open";
  std::string promo = "Promo";
  bool dmy_dates = false;  // parse dates as D/M/Y instead of ISO-8601
};

SalesPanel load_sales_csv(std::istream& in, const CsvSchema& schema = {});
void save_panel_csv(const SalesPanel& panel, std::ostream& out);

/// One store's open, positive-sales days on the natural-log scale.
struct SeriesView {
  int store_id = 0;
  std::vector<Date> dates;       // ascending
  std::vector<double> log_sales; // finite, same length as dates
  std::size_t size() const { return dates.size(); }
};

/// Drops closed and zero-sales rows, then takes ln(sales).
SeriesView log_series(const SalesPanel& panel, int store_id);

/// Promo flags aligned with log_series(panel, store) rows.
std::vector<std::uint8_t> promo_flags(const SalesPanel& panel, int store_id);

struct SplitSpec {
  std::optional<Date> cutoff_date;  // explicit train-side boundary (inclusive)
  int validation_months = 2;        // used when cutoff_date is not set
};

/// Splits into (train, validation): validation is every date strictly after
/// the cutoff; with no explicit cutoff, the cutoff is the last date minus
/// validation_months calendar months.
std::pair<SeriesView, SeriesView> train_validation_split(const SeriesView& series,
                                                         const SplitSpec& spec);

struct GenParams {
  double base_level = 8.0;     // log-sales level
  double store_spread = 0.4;   // sd of per-store level offsets
  std::array<double, 7> weekday_effect = {0.12, 0.0, -0.04, -0.02, 0.05,
                                          0.18, -0.25};  // Mon..Sun
  double promo_rate = 0.3;
  double promo_uplift = 0.3;   // log-space
  double ar_coeff = 0.5;       // |coeff| < 1
  double noise_sd = 0.1;
  bool close_sundays = true;
  Date start_date = make_date(2013, 1, 1);
};

/// Synthetic panel: per store, log-sales = store level + day-of-week effect
/// + promo uplift + AR(1) noise, exponentiated. Promo is drawn for every
/// calendar day (open or not). Deterministic for a fixed seed.
SalesPanel synthesize_panel(std::uint64_t seed, int n_stores, int n_days,
                            const GenParams& gen = {});

}  // namespace storecast

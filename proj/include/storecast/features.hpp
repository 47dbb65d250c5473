#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "storecast/panel.hpp"

namespace storecast {

/// Named-column design matrix plus target (log-sales), row-major.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<double> x;        // rows() * cols(), row-major
  std::vector<double> y;        // rows()
  std::vector<Date> row_dates;  // rows()

  std::size_t rows() const { return y.size(); }
  std::size_t cols() const { return column_names.size(); }
  double at(std::size_t i, std::size_t j) const { return x[i * cols() + j]; }
  const double* row(std::size_t i) const { return x.data() + i * cols(); }

  /// Gather column j into a contiguous vector.
  std::vector<double> column(std::size_t j) const;
  /// Index of a named column, or -1.
  int column_index(const std::string& name) const;

  /// Enforce the type invariants: n >= 1, unique names, finite entries.
  void validate() const;
};

void save_feature_csv(const FeatureMatrix& m, std::ostream& out);

enum class Framing { TS, IID };

struct FeatureSpec {
  Framing framing = Framing::TS;
  std::vector<int> lags;        // TS only; must be non-empty for TS
  bool include_promo = true;
  bool weekday = false;
  bool monthday = false;
  bool month = false;
};

/// Lag-based framing: row t carries log_sales[t - k] for each lag k plus the
/// requested calendar encodings; the first max(lag) rows are dropped and
/// y[t] = log_sales[t]. `promo` is aligned with the series rows.
FeatureMatrix build_ts_features(const SeriesView& series,
                                const std::vector<std::uint8_t>& promo,
                                const FeatureSpec& spec);

/// Exchangeable-row framing: one row per (store, open positive-sales day)
/// with calendar one-hots (reference levels Monday / January dropped),
/// monthday as an integer, promo, and the store's mean log-sales computed
/// from rows dated <= train_cutoff only.
FeatureMatrix build_iid_features(const SalesPanel& panel, const std::vector<int>& stores,
                                 const FeatureSpec& spec, Date train_cutoff);

/// Mean of ln(sales) over a store's open, positive-sales rows dated <= cutoff.
double store_mean_log_sales(const SalesPanel& panel, int store_id, Date cutoff);

/// Partition rows into (dated <= cutoff, dated after cutoff).
std::pair<FeatureMatrix, FeatureMatrix> split_by_date(const FeatureMatrix& m, Date cutoff);

}  // namespace storecast

#pragma once

#include <vector>

#include "storecast/panel.hpp"

namespace storecast {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;
};

struct ArimaModel {
  ArimaOrder order;
  std::vector<double> phi;
  std::vector<double> theta;
  double intercept = 0.0;  // fitted only when d = 0
  double sigma2 = 0.0;
  double aic = 0.0;
  int conditioning = 0;  // innovations before this index of the differenced series are zero
  // forecasting state
  std::vector<double> last_values;     // last p values of the differenced series
  std::vector<double> last_residuals;  // last q innovations
  std::vector<double> level_tails;     // last value of each difference level 0..d-1
};

/// Conditional-sum-of-squares fit over the full (p,d,q) grid within the
/// given maxima. Every candidate scores innovations from the same original
/// time index (max_d + max_p) so CSS values are comparable across d;
/// selection by AIC = n·ln(CSS/n) + 2(p+q+1) with ties going to the simpler
/// candidate (lower d, then p+q, then p).
ArimaModel fit_arima(const SeriesView& train, int max_p, int max_d, int max_q);

/// Recursive mean forecast: future innovations zero, differencing inverted.
std::vector<double> forecast_arima(const ArimaModel& model, int horizon);

/// CSS of the given parameter set on a differenced series, conditioning on
/// the first `start` values (start >= p; innovations before it are zero).
double arima_css(const std::vector<double>& w, int p, int q, double intercept,
                 const std::vector<double>& phi, const std::vector<double>& theta,
                 int start);

}  // namespace storecast

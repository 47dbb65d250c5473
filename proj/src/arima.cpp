#include "storecast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "storecast/errors.hpp"
#include "storecast/simplex.hpp"

namespace storecast {

namespace {

constexpr double kPenalty = 1e10;

std::vector<double> difference(const std::vector<double>& x) {
  std::vector<double> out(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) out[i - 1] = x[i] - x[i - 1];
  return out;
}

/// Inverse Durbin-Levinson: a stationary AR (or invertible MA) polynomial
/// maps to partial correlations all inside (-1,1).
bool outside_unit_region(std::vector<double> a) {
  for (int k = static_cast<int>(a.size()); k >= 1; --k) {
    const double r = a[static_cast<std::size_t>(k) - 1];
    if (std::fabs(r) >= 1.0) return true;
    if (k == 1) break;
    std::vector<double> prev(static_cast<std::size_t>(k) - 1);
    const double denom = 1.0 - r * r;
    for (int i = 0; i < k - 1; ++i) {
      prev[i] = (a[i] + r * a[static_cast<std::size_t>(k - 2 - i)]) / denom;
    }
    a = std::move(prev);
  }
  return false;
}

struct Candidate {
  double intercept = 0.0;
  std::vector<double> phi;
  std::vector<double> theta;
  double css = std::numeric_limits<double>::infinity();
};

/// Unpack simplex parameters [c?, phi.., theta..] and score; constraint
/// violations get a large finite penalty so the optimizer backs off.
double css_objective(const std::vector<double>& params, const std::vector<double>& w,
                     int p, int q, bool with_intercept, int start) {
  std::size_t k = 0;
  const double c = with_intercept ? params[k++] : 0.0;
  std::vector<double> phi(params.begin() + k, params.begin() + k + p);
  k += p;
  std::vector<double> theta(params.begin() + k, params.begin() + k + q);
  double excess = 0.0;
  for (double v : params) excess += std::fabs(v);
  if (p > 0 && outside_unit_region(phi)) return kPenalty * (1.0 + excess);
  if (q > 0 && outside_unit_region(theta)) return kPenalty * (1.0 + excess);
  return arima_css(w, p, q, c, phi, theta, start);
}

/// OLS regression of w_t on its first p lags (plus intercept) for the
/// simplex start point; small p, direct normal equations via Cramer-free
/// Gaussian elimination.
std::vector<double> ar_init(const std::vector<double>& w, int p, bool with_intercept) {
  const int n = static_cast<int>(w.size());
  const int m = p + 1;  // intercept column always used for the init
  std::vector<double> ata(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> atb(m, 0.0);
  for (int t = p; t < n; ++t) {
    std::vector<double> row(m, 1.0);
    for (int i = 1; i <= p; ++i) row[i] = w[static_cast<std::size_t>(t - i)];
    for (int i = 0; i < m; ++i) {
      atb[i] += row[i] * w[t];
      for (int j = 0; j < m; ++j) ata[static_cast<std::size_t>(i) * m + j] += row[i] * row[j];
    }
  }
  // Gaussian elimination with partial pivoting
  std::vector<double> sol(m, 0.0);
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r) {
      if (std::fabs(ata[static_cast<std::size_t>(r) * m + col]) >
          std::fabs(ata[static_cast<std::size_t>(pivot) * m + col])) {
        pivot = r;
      }
    }
    if (std::fabs(ata[static_cast<std::size_t>(pivot) * m + col]) < 1e-12) {
      return std::vector<double>(static_cast<std::size_t>(with_intercept ? m : p), 0.0);
    }
    if (pivot != col) {
      for (int j = 0; j < m; ++j) {
        std::swap(ata[static_cast<std::size_t>(col) * m + j],
                  ata[static_cast<std::size_t>(pivot) * m + j]);
      }
      std::swap(atb[col], atb[pivot]);
    }
    for (int r = col + 1; r < m; ++r) {
      const double f = ata[static_cast<std::size_t>(r) * m + col] /
                       ata[static_cast<std::size_t>(col) * m + col];
      for (int j = col; j < m; ++j) {
        ata[static_cast<std::size_t>(r) * m + j] -= f * ata[static_cast<std::size_t>(col) * m + j];
      }
      atb[r] -= f * atb[col];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    double v = atb[r];
    for (int j = r + 1; j < m; ++j) v -= ata[static_cast<std::size_t>(r) * m + j] * sol[j];
    sol[r] = v / ata[static_cast<std::size_t>(r) * m + r];
  }
  // shrink toward the stationary region if the OLS point falls outside
  std::vector<double> phi(sol.begin() + 1, sol.end());
  while (!phi.empty() && outside_unit_region(phi)) {
    for (double& v : phi) v *= 0.9;
  }
  std::vector<double> start;
  if (with_intercept) start.push_back(sol[0]);
  start.insert(start.end(), phi.begin(), phi.end());
  return start;
}

Candidate fit_order(const std::vector<double>& w, int p, int q, bool with_intercept,
                    int css_start) {
  Candidate cand;
  cand.phi.assign(p, 0.0);
  cand.theta.assign(q, 0.0);

  const int dim = (with_intercept ? 1 : 0) + p + q;
  if (dim == 0) {
    cand.css = arima_css(w, p, q, 0.0, {}, {}, css_start);
    return cand;
  }

  std::vector<double> start = ar_init(w, p, with_intercept);
  start.resize(dim, 0.0);  // theta starts at zero

  SimplexOptions opts;
  opts.max_iter = 500;
  opts.rel_tol = 1e-8;
  opts.initial_step = 0.1;
  const auto result = nelder_mead_restarted(
      [&](const std::vector<double>& params) {
        return css_objective(params, w, p, q, with_intercept, css_start);
      },
      start, opts);

  std::size_t k = 0;
  if (with_intercept) cand.intercept = result.x[k++];
  for (int i = 0; i < p; ++i) cand.phi[i] = result.x[k++];
  for (int j = 0; j < q; ++j) cand.theta[j] = result.x[k++];
  cand.css = result.fx;
  return cand;
}

}  // namespace

double arima_css(const std::vector<double>& w, int p, int q, double intercept,
                 const std::vector<double>& phi, const std::vector<double>& theta,
                 int start) {
  const int n = static_cast<int>(w.size());
  if (start < p || start > n) raise(Errc::BadFlag, "conditioning window out of range");
  std::vector<double> eps(w.size(), 0.0);
  double css = 0.0;
  for (int t = start; t < n; ++t) {
    double e = w[t] - intercept;
    for (int i = 1; i <= p; ++i) e -= phi[i - 1] * w[static_cast<std::size_t>(t - i)];
    for (int j = 1; j <= q; ++j) {
      if (t - j >= 0) e -= theta[j - 1] * eps[static_cast<std::size_t>(t - j)];
    }
    eps[t] = e;
    css += e * e;
  }
  return css;
}

ArimaModel fit_arima(const SeriesView& train, int max_p, int max_d, int max_q) {
  if (max_p < 0 || max_d < 0 || max_d > 2 || max_q < 0) {
    raise(Errc::BadFlag, "order maxima out of range");
  }
  const auto n = train.size();
  const auto needed = static_cast<std::size_t>(10 * (max_p + max_q + 1));
  if (n < needed) {
    raise(Errc::SeriesTooShort, "need at least " + std::to_string(needed) +
                                    " observations, have " + std::to_string(n));
  }

  // differenced copies up front
  std::vector<std::vector<double>> diffs;
  diffs.push_back(train.log_sales);
  for (int d = 1; d <= max_d; ++d) diffs.push_back(difference(diffs.back()));

  ArimaModel best;
  double best_aic = std::numeric_limits<double>::infinity();
  bool found = false;

  for (int d = 0; d <= max_d; ++d) {
    for (int total = 0; total <= max_p + max_q; ++total) {
      for (int p = 0; p <= std::min(total, max_p); ++p) {
        const int q = total - p;
        if (q > max_q) continue;
        const auto& w = diffs[d];
        const bool with_intercept = d == 0;
        // same first scored innovation (original index max_d + max_p) for
        // every candidate, so CSS is comparable across the grid
        const int css_start = max_d + max_p - d;
        const auto cand = fit_order(w, p, q, with_intercept, css_start);
        if (!std::isfinite(cand.css) || cand.css >= 0.5 * kPenalty) continue;
        const auto n_css = static_cast<double>(w.size()) - css_start;
        const double aic = n_css * std::log(std::max(cand.css, 1e-300) / n_css) +
                           2.0 * (p + q + 1);
        if (aic < best_aic) {
          best_aic = aic;
          best.order = {p, d, q};
          best.phi = cand.phi;
          best.theta = cand.theta;
          best.intercept = cand.intercept;
          best.sigma2 = std::max(cand.css / n_css, 1e-300);
          best.aic = aic;
          best.conditioning = css_start;
          found = true;
        }
      }
    }
  }
  if (!found) raise(Errc::OptimizerDiverged, "no order produced a finite objective");

  // forecasting state from the winning order, same conditioning as the fit
  const auto& w = diffs[best.order.d];
  const int p = best.order.p;
  const int q = best.order.q;
  std::vector<double> eps(w.size(), 0.0);
  for (int t = best.conditioning; t < static_cast<int>(w.size()); ++t) {
    double e = w[t] - best.intercept;
    for (int i = 1; i <= p; ++i) e -= best.phi[i - 1] * w[static_cast<std::size_t>(t - i)];
    for (int j = 1; j <= q; ++j) {
      if (t - j >= 0) e -= best.theta[j - 1] * eps[static_cast<std::size_t>(t - j)];
    }
    eps[t] = e;
  }
  best.last_values.assign(w.end() - p, w.end());
  best.last_residuals.assign(eps.end() - q, eps.end());
  for (int k = 0; k < best.order.d; ++k) best.level_tails.push_back(diffs[k].back());
  return best;
}

std::vector<double> forecast_arima(const ArimaModel& model, int horizon) {
  if (horizon < 1) raise(Errc::BadFlag, "horizon must be >= 1");
  const int p = model.order.p;
  const int q = model.order.q;
  std::vector<double> w = model.last_values;      // grows with forecasts
  std::vector<double> eps = model.last_residuals; // future innovations are 0
  std::vector<double> levels = model.level_tails;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));

  for (int h = 1; h <= horizon; ++h) {
    double next = model.intercept;
    for (int i = 1; i <= p; ++i) next += model.phi[i - 1] * w[w.size() - i];
    for (int j = 1; j <= q; ++j) {
      const int idx = static_cast<int>(eps.size()) - j + (h - 1);
      if (idx >= 0 && idx < static_cast<int>(eps.size())) {
        next += model.theta[j - 1] * eps[idx];
      }
    }
    w.push_back(next);
    // invert differencing: each level accumulates the one above it
    double acc = next;
    for (int k = model.order.d - 1; k >= 0; --k) {
      levels[k] += acc;
      acc = levels[k];
    }
    out.push_back(model.order.d > 0 ? levels[0] : next);
  }
  return out;
}

}  // namespace storecast

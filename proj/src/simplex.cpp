#include "storecast/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace storecast {

namespace {

double guard(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start,
                          const SimplexOptions& opts) {
  const std::size_t n = start.size();
  SimplexResult result;
  if (n == 0) {
    result.x = start;
    result.fx = guard(f(start));
    result.converged = true;
    return result;
  }

  // standard coefficients: reflect 1, expand 2, contract 1/2, shrink 1/2
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<std::vector<double>> verts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    double step = opts.initial_step * std::max(1.0, std::fabs(start[i]));
    verts[i + 1][i] += step;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = guard(f(verts[i]));

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second_worst = order[n - 1];

    const double spread = fv[worst] - fv[best];
    if (std::isfinite(fv[best]) && spread <= opts.rel_tol * (std::fabs(fv[best]) + 1e-12)) {
      result.converged = true;
      break;
    }

    // centroid of all but the worst vertex
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j];
    }
    for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j)
      xr[j] = centroid[j] + alpha * (centroid[j] - verts[worst][j]);
    const double fr = guard(f(xr));

    if (fr < fv[best]) {
      for (std::size_t j = 0; j < n; ++j)
        xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
      const double fe = guard(f(xe));
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second_worst]) {
      verts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j)
      xc[j] = centroid[j] + rho * (verts[worst][j] - centroid[j]);
    const double fc = guard(f(xc));
    if (fc < fv[worst]) {
      verts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        verts[i][j] = verts[best][j] + sigma * (verts[i][j] - verts[best][j]);
      fv[i] = guard(f(verts[i]));
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  result.x = verts[best];
  result.fx = fv[best];
  result.iterations = iter;
  return result;
}

SimplexResult nelder_mead_restarted(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& start, const SimplexOptions& opts) {
  SimplexResult first = nelder_mead(f, start, opts);
  SimplexOptions again = opts;
  again.initial_step = opts.initial_step * 0.25;
  SimplexResult second = nelder_mead(f, first.x, again);
  if (second.fx <= first.fx) {
    second.iterations += first.iterations;
    return second;
  }
  first.iterations += second.iterations;
  return first;
}

}  // namespace storecast

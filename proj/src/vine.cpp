#include "storecast/vine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "storecast/errors.hpp"
#include "storecast/rng.hpp"
#include "storecast/special.hpp"

namespace storecast {

namespace {

constexpr double kUniformClamp = 1e-12;

double clamp_uniform(double v) {
  return std::min(std::max(v, kUniformClamp), 1.0 - kUniformClamp);
}

void require_interior(double u, double v) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    raise(Errc::BoundaryInput, "h-function needs strictly interior (u, v)");
  }
}

/// Kendall tau-sum root choice over an explicit set of columns.
std::size_t root_position(const std::vector<std::vector<double>>& cols) {
  const std::size_t m = cols.size();
  std::vector<double> sums(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double t = std::fabs(kendall_tau(cols[i], cols[j]));
      sums[i] += t;
      sums[j] += t;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (sums[i] > sums[best]) best = i;  // strict: ties keep the lowest index
  }
  return best;
}

/// Fit one edge: independence pre-test, then AIC over the allowed families.
PairCopula fit_edge(const std::vector<double>& a, const std::vector<double>& b,
                    const FamilySet& allowed) {
  PairCopula edge;
  edge.tau = kendall_tau(a, b);
  const auto n = static_cast<double>(a.size());
  const double z = std::fabs(edge.tau) *
                   std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0)));
  if (z < 1.96 || (!allowed.gaussian && !allowed.student)) {
    edge.family = CopulaFamily::Independence;
    return edge;
  }

  PseudoObservations pair;
  pair.columns = {a, b};
  double best_aic = std::numeric_limits<double>::infinity();
  if (allowed.gaussian) {
    const auto fit = fit_gaussian_copula(pair);
    best_aic = 2.0 * 1.0 - 2.0 * fit.loglik;
    edge.family = CopulaFamily::Gaussian;
    edge.rho = fit.rho;
    edge.nu = 0.0;
    edge.loglik = fit.loglik;
  }
  if (allowed.student) {
    const auto fit = fit_t_copula(pair);
    const double aic = 2.0 * 2.0 - 2.0 * fit.loglik;
    if (aic < best_aic) {
      edge.family = CopulaFamily::Student;
      edge.rho = fit.rho;
      edge.nu = fit.nu;
      edge.loglik = fit.loglik;
    }
  }
  return edge;
}

}  // namespace

std::size_t select_cvine_root(const PseudoObservations& u) {
  if (u.dims() < 2) raise(Errc::KindMismatch, "root selection needs at least 2 columns");
  return root_position(u.columns);
}

CVineSpec fit_cvine(const PseudoObservations& u, const FamilySet& allowed) {
  if (u.dims() < 2) raise(Errc::KindMismatch, "vine needs at least 2 columns");
  if (u.rows() < 50) {
    raise(Errc::TooFewRows,
          "vine fit needs at least 50 observations, have " + std::to_string(u.rows()));
  }

  CVineSpec spec;
  // remaining variables as (original index, current conditioned column)
  std::vector<std::pair<std::size_t, std::vector<double>>> level;
  level.reserve(u.dims());
  for (std::size_t j = 0; j < u.dims(); ++j) level.emplace_back(j, u.columns[j]);

  std::vector<std::size_t> conditioned;
  while (level.size() > 1) {
    std::vector<std::vector<double>> cols;
    cols.reserve(level.size());
    for (const auto& [idx, col] : level) cols.push_back(col);
    const std::size_t root = root_position(cols);
    const auto root_idx = level[root].first;
    const auto root_col = level[root].second;
    spec.order.push_back(root_idx);

    std::vector<PairCopula> tree;
    std::vector<std::pair<std::size_t, std::vector<double>>> next;
    for (std::size_t j = 0; j < level.size(); ++j) {
      if (j == root) continue;
      auto edge = fit_edge(level[j].second, root_col, allowed);
      edge.var_a = root_idx;
      edge.var_b = level[j].first;
      edge.conditioned_on = conditioned;
      if (spec.trees.empty()) spec.tree1_taus.push_back(edge.tau);

      std::vector<double> transformed(root_col.size());
      for (std::size_t i = 0; i < root_col.size(); ++i) {
        transformed[i] = h_function(edge, level[j].second[i], root_col[i]);
      }
      next.emplace_back(level[j].first, std::move(transformed));
      tree.push_back(std::move(edge));
    }
    spec.trees.push_back(std::move(tree));
    conditioned.push_back(root_idx);
    level = std::move(next);
  }
  spec.order.push_back(level[0].first);
  return spec;
}

double h_function(const PairCopula& pc, double u, double v) {
  require_interior(u, v);
  switch (pc.family) {
    case CopulaFamily::Independence:
      return u;
    case CopulaFamily::Gaussian: {
      const double x = special::norm_quantile(u);
      const double y = special::norm_quantile(v);
      const double z = (x - pc.rho * y) / std::sqrt(1.0 - pc.rho * pc.rho);
      return clamp_uniform(special::norm_cdf(z));
    }
    case CopulaFamily::Student: {
      const double x = special::t_quantile(u, pc.nu);
      const double y = special::t_quantile(v, pc.nu);
      const double scale =
          std::sqrt((pc.nu + y * y) * (1.0 - pc.rho * pc.rho) / (pc.nu + 1.0));
      return clamp_uniform(special::t_cdf((x - pc.rho * y) / scale, pc.nu + 1.0));
    }
  }
  raise(Errc::KindMismatch, "unknown pair-copula family");
}

double h_inverse(const PairCopula& pc, double w, double v) {
  require_interior(w, v);
  switch (pc.family) {
    case CopulaFamily::Independence:
      return w;
    case CopulaFamily::Gaussian: {
      const double z = special::norm_quantile(w);
      const double y = special::norm_quantile(v);
      const double x = z * std::sqrt(1.0 - pc.rho * pc.rho) + pc.rho * y;
      return clamp_uniform(special::norm_cdf(x));
    }
    case CopulaFamily::Student: {
      const double z = special::t_quantile(w, pc.nu + 1.0);
      const double y = special::t_quantile(v, pc.nu);
      const double scale =
          std::sqrt((pc.nu + y * y) * (1.0 - pc.rho * pc.rho) / (pc.nu + 1.0));
      return clamp_uniform(special::t_cdf(z * scale + pc.rho * y, pc.nu));
    }
  }
  raise(Errc::KindMismatch, "unknown pair-copula family");
}

PseudoObservations sample_cvine(const CVineSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::size_t d = spec.order.size();
  if (d < 2 || spec.trees.size() != d - 1) {
    raise(Errc::KindMismatch, "vine spec is malformed");
  }
  for (std::size_t t = 0; t < spec.trees.size(); ++t) {
    if (spec.trees[t].size() != d - 1 - t) {
      raise(Errc::KindMismatch, "tree " + std::to_string(t + 1) + " has the wrong edge count");
    }
  }

  // independent uniforms, one per (observation, vine level)
  Rng rng(seed);
  std::vector<std::vector<double>> w(d, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < d; ++t) w[t][i] = rng.uniform_open();
  }

  // walk levels bottom-up: level t holds the variables order[t..] expressed
  // conditionally on the roots above it; h_inverse peels one root per step
  std::vector<std::pair<std::size_t, std::vector<double>>> level;
  level.emplace_back(spec.order[d - 1], w[d - 1]);
  for (std::size_t t = d - 1; t-- > 0;) {
    std::vector<std::pair<std::size_t, std::vector<double>>> lifted;
    lifted.emplace_back(spec.order[t], w[t]);
    const auto& root_col = w[t];
    for (auto& [var, col] : level) {
      const auto edge = std::find_if(
          spec.trees[t].begin(), spec.trees[t].end(),
          [var = var](const PairCopula& pc) { return pc.var_b == var; });
      if (edge == spec.trees[t].end()) {
        raise(Errc::KindMismatch,
              "tree " + std::to_string(t + 1) + " is missing the edge to variable " +
                  std::to_string(var));
      }
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = h_inverse(*edge, col[i], root_col[i]);
      }
      lifted.emplace_back(var, std::move(out));
    }
    level = std::move(lifted);
  }

  PseudoObservations result;
  result.columns.assign(d, {});
  for (auto& [var, col] : level) {
    if (var >= d || !result.columns[var].empty()) {
      raise(Errc::KindMismatch, "vine order is not a permutation");
    }
    result.columns[var] = std::move(col);
  }
  return result;
}

std::vector<double> jittered_ranks(const std::vector<double>& x, std::uint64_t seed) {
  if (x.size() < 2) raise(Errc::TooFewRows, "jitter needs at least 2 values");
  auto sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double step = sorted[i] - sorted[i - 1];
    if (step > 0.0 && step < gap) gap = step;
  }
  if (!std::isfinite(gap)) gap = 2.0;  // constant column: pure noise is all there is
  Rng rng(seed);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] + (rng.uniform_open() - 0.5) * 0.5 * gap;
  }
  return out;
}

}  // namespace storecast

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "storecast/copulas.hpp"
#include "storecast/errors.hpp"
#include "storecast/rng.hpp"
#include "storecast/special.hpp"
#include "storecast/vine.hpp"

using namespace storecast;

namespace {

/// P(X<=x, Y<=y) for a standard bivariate normal, by Simpson quadrature of
/// the conditional-CDF integrand. Accurate to ~1e-11 at these ranges.
double bvn_cdf(double x, double y, double rho) {
  const double lo = -8.0;
  if (x <= lo) return 0.0;
  const int steps = 4000;
  const double h = (x - lo) / steps;
  const double denom = std::sqrt(1.0 - rho * rho);
  const auto f = [&](double s) {
    return special::norm_pdf(s) * special::norm_cdf((y - rho * s) / denom);
  };
  double acc = f(lo) + f(x);
  for (int i = 1; i < steps; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

PairCopula gaussian_edge(double rho, std::size_t a, std::size_t b) {
  PairCopula pc;
  pc.family = CopulaFamily::Gaussian;
  pc.rho = rho;
  pc.var_a = a;
  pc.var_b = b;
  return pc;
}

/// Three-variable all-Gaussian canonical vine rooted at 0.
CVineSpec gaussian_vine(double r01, double r02, double r12_given_0) {
  CVineSpec spec;
  spec.order = {0, 1, 2};
  spec.trees.resize(2);
  spec.trees[0] = {gaussian_edge(r01, 0, 1), gaussian_edge(r02, 0, 2)};
  auto deep = gaussian_edge(r12_given_0, 1, 2);
  deep.conditioned_on = {0};
  spec.trees[1] = {deep};
  return spec;
}

}  // namespace

TEST_CASE("root selection picks the variable with the most tau mass") {
  Rng rng(31);
  const std::size_t n = 300;
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    b[i] = z;  // the driver sits at index 1
    a[i] = 0.8 * z + 0.6 * rng.normal();
    c[i] = 0.7 * z + 0.7 * rng.normal();
  }
  const auto u = pseudo_observations({a, b, c});
  CHECK(select_cvine_root(u) == 1);

  // brute-force the same rule
  std::vector<double> sums(3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) sums[i] += std::fabs(kendall_tau(u.columns[i], u.columns[j]));
    }
  }
  const auto argmax = static_cast<std::size_t>(
      std::max_element(sums.begin(), sums.end()) - sums.begin());
  CHECK(select_cvine_root(u) == argmax);
}

TEST_CASE("root selection ties break to the lowest index") {
  // full 2x2x2 factorial: every pair of columns has exactly zero tau
  const std::vector<double> a = {0, 0, 0, 0, 1, 1, 1, 1};
  const std::vector<double> b = {0, 0, 1, 1, 0, 0, 1, 1};
  const std::vector<double> c = {0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(kendall_tau(a, b) == 0.0);
  CHECK(kendall_tau(a, c) == 0.0);
  CHECK(kendall_tau(b, c) == 0.0);
  CHECK(select_cvine_root(pseudo_observations({a, b, c})) == 0);
}

TEST_CASE("root selection is invariant under monotone transforms") {
  Rng rng(17);
  std::vector<double> a(120), b(120), c(120);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double z = rng.normal();
    a[i] = z + 0.4 * rng.normal();
    b[i] = 0.5 * z + rng.normal();
    c[i] = z;
  }
  const auto before = select_cvine_root(pseudo_observations({a, b, c}));
  std::vector<double> warped(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) warped[i] = std::exp(3.0 * c[i]);
  CHECK(select_cvine_root(pseudo_observations({a, b, warped})) == before);
}

TEST_CASE("two-column vine degenerates to the plain pair fit") {
  GaussianCopulaParams truth;
  truth.rho = 0.65;
  const auto draws = sample_copula(truth, 400, 9);
  const auto u = pseudo_observations(draws.columns);

  FamilySet gaussian_only;
  gaussian_only.student = false;
  const auto vine = fit_cvine(u, gaussian_only);
  CHECK(vine.order.size() == 2);
  CHECK(vine.trees.size() == 1);
  CHECK(vine.trees[0].size() == 1);
  CHECK(vine.trees[0][0].family == CopulaFamily::Gaussian);
  CHECK(vine.trees[0][0].rho == fit_gaussian_copula(u).rho);
  CHECK(vine.tree1_taus[0] == kendall_tau(u.columns[0], u.columns[1]));

  FamilySet student_only;
  student_only.gaussian = false;
  const auto tvine = fit_cvine(u, student_only);
  CHECK(tvine.trees[0][0].family == CopulaFamily::Student);
  CHECK(tvine.trees[0][0].nu == fit_t_copula(u).nu);
}

TEST_CASE("independent columns fit as an independence vine") {
  Rng rng(4);
  std::vector<std::vector<double>> cols(3, std::vector<double>(2000));
  for (auto& col : cols) {
    for (double& v : col) v = rng.uniform_open();
  }
  const auto vine = fit_cvine(pseudo_observations(cols));
  for (const auto& tree : vine.trees) {
    for (const auto& edge : tree) {
      CHECK(edge.family == CopulaFamily::Independence);
    }
  }
}

TEST_CASE("h-function endpoints and reductions") {
  PairCopula indep;
  CHECK(h_function(indep, 0.3, 0.8) == 0.3);
  CHECK(h_inverse(indep, 0.3, 0.8) == 0.3);

  const auto flat = gaussian_edge(0.0, 0, 1);
  for (double u : {0.1, 0.37, 0.82}) {
    CHECK(h_function(flat, u, 0.6) == doctest::Approx(u).epsilon(1e-12));
  }

  CHECK_THROWS_AS(h_function(indep, 0.0, 0.5), Error);
  CHECK_THROWS_AS(h_function(indep, 0.5, 1.0), Error);
  CHECK_THROWS_AS(h_inverse(indep, 1.0, 0.5), Error);
}

TEST_CASE("gaussian h-function matches a finite-difference oracle") {
  const auto pc = gaussian_edge(0.5, 0, 1);
  const double delta = 1e-5;
  for (auto [u, v] : {std::pair{0.3, 0.6}, {0.7, 0.2}, {0.5, 0.5}, {0.15, 0.85}}) {
    const double x = special::norm_quantile(u);
    const double hi = bvn_cdf(x, special::norm_quantile(v + delta), 0.5);
    const double lo = bvn_cdf(x, special::norm_quantile(v - delta), 0.5);
    const double fd = (hi - lo) / (2.0 * delta);
    CHECK(h_function(pc, u, v) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("h-functions stay interior, increase in u, and invert") {
  PairCopula indep;
  const auto gauss = gaussian_edge(0.7, 0, 1);
  PairCopula student;
  student.family = CopulaFamily::Student;
  student.rho = -0.5;
  student.nu = 4.0;

  for (const auto& pc : {indep, gauss, student}) {
    for (double v : {0.1, 0.5, 0.9}) {
      double prev = 0.0;
      for (int i = 1; i <= 49; ++i) {
        const double u = i / 50.0;
        const double h = h_function(pc, u, v);
        CHECK(h > 0.0);
        CHECK(h < 1.0);
        CHECK(h >= prev);
        prev = h;
        CHECK(h_inverse(pc, h, v) == doctest::Approx(u).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("sampling an all-independence vine gives independent columns") {
  CVineSpec spec;
  spec.order = {0, 1, 2};
  spec.trees.resize(2);
  PairCopula e01, e02, e12;
  e01.var_a = 0; e01.var_b = 1;
  e02.var_a = 0; e02.var_b = 2;
  e12.var_a = 1; e12.var_b = 2; e12.conditioned_on = {0};
  spec.trees[0] = {e01, e02};
  spec.trees[1] = {e12};

  const auto draws = sample_cvine(spec, 5000, 3);
  CHECK(std::fabs(kendall_tau(draws.columns[0], draws.columns[1])) < 0.04);
  CHECK(std::fabs(kendall_tau(draws.columns[0], draws.columns[2])) < 0.04);
  CHECK(std::fabs(kendall_tau(draws.columns[1], draws.columns[2])) < 0.04);
}

TEST_CASE("two-variable vine sampling matches plain copula sampling") {
  CVineSpec spec;
  spec.order = {0, 1};
  spec.trees = {{gaussian_edge(0.5, 0, 1)}};
  const auto vine_draws = sample_cvine(spec, 4000, 11);

  GaussianCopulaParams pair;
  pair.rho = 0.5;
  const auto pair_draws = sample_copula(pair, 4000, 11);

  const double tau_target = 2.0 / 3.141592653589793 * std::asin(0.5);
  const double vine_tau = kendall_tau(vine_draws.columns[0], vine_draws.columns[1]);
  const double pair_tau = kendall_tau(pair_draws.columns[0], pair_draws.columns[1]);
  CHECK(std::fabs(vine_tau - tau_target) < 0.03);
  CHECK(std::fabs(pair_tau - tau_target) < 0.03);

  const auto again = sample_cvine(spec, 4000, 11);
  CHECK(again.columns[0] == vine_draws.columns[0]);
  const auto other = sample_cvine(spec, 4000, 12);
  CHECK(other.columns[0] != vine_draws.columns[0]);
}

TEST_CASE("vine round trip recovers edges and taus") {
  const auto truth = gaussian_vine(0.6, 0.4, 0.2);
  const auto data = sample_cvine(truth, 5000, 42);
  const auto fitted = fit_cvine(data);

  CHECK(fitted.order.size() == 3);
  CHECK(fitted.trees.size() == 2);
  CHECK(fitted.trees[0].size() == 2);
  CHECK(fitted.trees[1].size() == 1);
  CHECK(fitted.order[0] == 0);  // 0 carries the most dependence by design

  for (const auto& edge : fitted.trees[0]) {
    const double target = edge.var_b == 1 ? 0.6 : 0.4;
    CHECK(edge.family == CopulaFamily::Gaussian);
    CHECK(std::fabs(edge.rho - target) < 0.07);
  }

  // resampling from the fitted spec reproduces the observed tree-1 taus
  const auto resampled = sample_cvine(fitted, 5000, 43);
  const auto root = fitted.order[0];
  std::size_t k = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == root) continue;
    const double tau = kendall_tau(resampled.columns[root], resampled.columns[j]);
    CHECK(std::fabs(tau - fitted.tree1_taus[k]) < 0.05);
    ++k;
  }
}

TEST_CASE("vine sampling validates the spec shape") {
  CVineSpec bad;
  bad.order = {0, 1, 2};
  bad.trees = {{gaussian_edge(0.5, 0, 1)}};  // tree 1 should have 2 edges
  CHECK_THROWS_AS(sample_cvine(bad, 10, 1), Error);
}

TEST_CASE("jittered ranks break ties deterministically") {
  Rng rng(23);
  std::vector<double> promo(500);
  for (double& v : promo) v = rng.uniform() < 0.4 ? 1.0 : 0.0;

  const auto jittered = jittered_ranks(promo, 77);
  auto sorted = jittered;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());  // all distinct

  double max_zero = -1e300, min_one = 1e300;
  for (std::size_t i = 0; i < promo.size(); ++i) {
    if (promo[i] == 0.0) max_zero = std::max(max_zero, jittered[i]);
    if (promo[i] == 1.0) min_one = std::min(min_one, jittered[i]);
  }
  CHECK(max_zero < min_one);  // cross-group order survives the jitter

  CHECK(jittered_ranks(promo, 77) == jittered);
  CHECK(jittered_ranks(promo, 78) != jittered);
}

TEST_CASE("a binary column flows through the vine after jittering") {
  Rng rng(8);
  const std::size_t n = 600;
  std::vector<double> promo(n), sales(n), unrelated(n);
  for (std::size_t i = 0; i < n; ++i) {
    promo[i] = rng.uniform() < 0.4 ? 1.0 : 0.0;
    sales[i] = 1.2 * promo[i] + rng.normal();
    unrelated[i] = rng.normal();
  }
  const auto u = pseudo_observations({sales, jittered_ranks(promo, 5), unrelated});
  const auto vine = fit_cvine(u);
  CHECK(vine.trees[0].size() == 2);

  bool promo_edge_dependent = false;
  for (const auto& edge : vine.trees[0]) {
    const bool touches_promo = edge.var_a == 1 || edge.var_b == 1;
    if (touches_promo && edge.family != CopulaFamily::Independence) {
      promo_edge_dependent = true;
    }
  }
  // root may be sales or promo; either way the sales-promo edge sits in tree 1
  CHECK(promo_edge_dependent);
}

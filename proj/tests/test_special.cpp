#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "storecast/rng.hpp"
#include "storecast/special.hpp"

using namespace storecast::special;

// Reference values computed with 25-digit arbitrary-precision arithmetic.

TEST_CASE("digamma and trigamma") {
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
  CHECK(digamma(3.7) == doctest::Approx(1.1671535393615114).epsilon(1e-12));
  CHECK(digamma(0.3) == doctest::Approx(-3.5025242222001330).epsilon(1e-12));
  CHECK(trigamma(2.2) == doctest::Approx(0.5729327609793347).epsilon(1e-12));
  CHECK(trigamma(0.4) == doctest::Approx(7.2753565905295974).epsilon(1e-12));
  // recurrence consistency: psi(x+1) = psi(x) + 1/x
  CHECK(digamma(5.3) == doctest::Approx(digamma(4.3) + 1.0 / 4.3).epsilon(1e-13));
}

TEST_CASE("regularized incomplete gamma") {
  CHECK(gamma_p(2.5, 3.7) == doctest::Approx(0.8074495669206042).epsilon(1e-12));
  CHECK(gamma_p(0.5, 0.2) == doctest::Approx(0.4729107431344619).epsilon(1e-12));
  CHECK(gamma_p(10.0, 3.0) == doctest::Approx(0.0011024881301154797).epsilon(1e-10));
  CHECK(gamma_p(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("incomplete gamma inverse round-trips") {
  for (double a : {0.4, 1.0, 2.5, 10.0, 50.0}) {
    for (double p : {0.01, 0.1, 0.3, 0.5, 0.9, 0.99}) {
      const double x = gamma_p_inv(a, p);
      CHECK(gamma_p(a, x) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("regularized incomplete beta") {
  CHECK(beta_inc(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  CHECK(beta_inc(0.5, 0.5, 0.75) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(beta_inc(2.0, 3.0, 0.0) == 0.0);
  CHECK(beta_inc(2.0, 3.0, 1.0) == 1.0);
  for (double p : {0.05, 0.3, 0.5, 0.8, 0.97}) {
    CHECK(beta_inc(2.5, 0.5, beta_inc_inv(2.5, 0.5, p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.2345) == doctest::Approx(0.8914916766373298).epsilon(1e-13));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_quantile(0.95) == doctest::Approx(1.6448536269514727).epsilon(1e-12));
  CHECK(norm_quantile(1e-6) == doctest::Approx(-4.753424308822899).epsilon(1e-10));
  for (double p : {0.001, 0.025, 0.2, 0.5, 0.7, 0.999}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("student-t pdf, cdf, quantile") {
  CHECK(t_pdf(0.7, 4.0) == doctest::Approx(0.2809088317119511).epsilon(1e-12));
  CHECK(t_cdf(1.1, 5.0) == doctest::Approx(0.8392745895036833).epsilon(1e-12));
  CHECK(t_cdf(0.0, 7.0) == 0.5);
  CHECK(t_quantile(0.95, 5.0) == doctest::Approx(2.0150483733330233).epsilon(1e-10));
  CHECK(t_quantile(0.3, 7.0) == doctest::Approx(-0.5491096579472403).epsilon(1e-10));
  for (double p : {0.02, 0.3, 0.5, 0.77, 0.98}) {
    CHECK(t_cdf(t_quantile(p, 6.0), 6.0) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("rng determinism and moments") {
  storecast::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  storecast::Rng c(42, 1);
  CHECK(c.next_u64() != storecast::Rng(42, 2).next_u64());

  storecast::Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1.0));
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));

  double gsum = 0.0;
  for (int i = 0; i < n; ++i) gsum += rng.gamma(2.5);
  CHECK(gsum / n == doctest::Approx(2.5).epsilon(0.02));

  double bsum = 0.0;
  for (int i = 0; i < n; ++i) bsum += rng.beta(2.0, 3.0);
  CHECK(bsum / n == doctest::Approx(0.4).epsilon(0.02));
}

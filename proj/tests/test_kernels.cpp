#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "storecast/kernels.hpp"
#include "storecast/rng.hpp"

using namespace storecast;
namespace k = storecast::kernels;

namespace {

// Lengths straddling the 4- and 16-lane unroll boundaries.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 100, 1023};

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (rng.uniform() - 0.5);
  return v;
}

// Vector lanes reassociate the sum, so allow rounding at the scale of the
// absolute-value sum of the terms.
void check_close(double got, double want, double magnitude) {
  CHECK(std::fabs(got - want) <= 1e-13 * (magnitude + 1.0));
}

}  // namespace

TEST_CASE("scalar reference kernels on small known inputs") {
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(k::scalar::dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(k::scalar::sum(a, 3) == doctest::Approx(6.0));
  CHECK(k::scalar::sumsq(b, 3) == doctest::Approx(77.0));
  CHECK(k::scalar::sumsq_diff(a, b, 3) == doctest::Approx(9.0 + 49.0 + 9.0));
  const double w[] = {2.0, 0.5, 1.0};
  CHECK(k::scalar::weighted_dot(w, a, b, 3) == doctest::Approx(8.0 - 5.0 + 18.0));
  double y[] = {1.0, 1.0, 1.0};
  k::scalar::axpy(2.0, a, y, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(5.0));
  CHECK(y[2] == doctest::Approx(7.0));
}

TEST_CASE("avx2 backend matches the scalar reference") {
  if (!k::avx2_supported()) {
    MESSAGE("AVX2 not available on this CPU, equivalence check skipped");
    return;
  }
  const k::Backend before = k::active_backend();
  REQUIRE(k::set_backend(k::Backend::Avx2));
  Rng rng(20240817);
  for (std::size_t n : kLengths) {
    auto a = random_vec(rng, n, 3.0);
    auto b = random_vec(rng, n, 2.0);
    auto w = random_vec(rng, n, 1.0);

    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]);

    check_close(k::dot(a.data(), b.data(), n), k::scalar::dot(a.data(), b.data(), n), mag);
    check_close(k::sum(a.data(), n), k::scalar::sum(a.data(), n), mag);
    check_close(k::sumsq(a.data(), n), k::scalar::sumsq(a.data(), n), mag);
    check_close(k::sumsq_diff(a.data(), b.data(), n),
                k::scalar::sumsq_diff(a.data(), b.data(), n), mag + 10.0);
    check_close(k::weighted_dot(w.data(), a.data(), b.data(), n),
                k::scalar::weighted_dot(w.data(), a.data(), b.data(), n), mag);

    auto y1 = random_vec(rng, n, 1.0);
    auto y2 = y1;
    k::axpy(0.37, a.data(), y1.data(), n);
    k::scalar::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
    }
  }
  k::set_backend(before);
}

TEST_CASE("backend switching") {
  const k::Backend before = k::active_backend();
  CHECK(k::set_backend(k::Backend::Scalar));
  CHECK(k::active_backend() == k::Backend::Scalar);
  const double a[] = {1.0, 2.0};
  CHECK(k::dot(a, a, 2) == doctest::Approx(5.0));
  if (k::avx2_supported()) {
    CHECK(k::set_backend(k::Backend::Avx2));
    CHECK(k::active_backend() == k::Backend::Avx2);
  } else {
    CHECK_FALSE(k::set_backend(k::Backend::Avx2));
    CHECK(k::active_backend() == k::Backend::Scalar);
  }
  k::set_backend(before);
}

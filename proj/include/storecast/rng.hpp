#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace storecast {

// Deterministic RNG used everywhere a seed appears in a public contract.
// mt19937_64 is fully specified by the standard; the distribution transforms
// below are our own so that a (seed, stream) pair reproduces the same draws
// on any conforming implementation. Independent streams come from mixing the
// stream id into the seed (splitmix64), per the seed+stream concurrency rule.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(mix(seed, stream)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to feed into log/quantiles.
  double uniform_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound >= 1. Rejection keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 boosted via
  /// Gamma(shape+1) * U^(1/shape).
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_open();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  double student_t(double df) {
    return normal() / std::sqrt(chi_square(df) / df);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace storecast

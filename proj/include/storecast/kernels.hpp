#pragma once

#include <cstddef>

namespace storecast::kernels {

// Dense double-precision inner loops shared by the fitting code. Every
// operation has a scalar reference implementation and an AVX2 variant;
// the active backend is picked once at startup (CPU probe, overridable
// via STORECAST_KERNELS=scalar|avx2|auto) and can be switched in-process
// for equivalence testing. Vector variants reassociate partial sums, so
// they match the scalar reference to rounding, not bit-for-bit.

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool avx2_supported();
Backend active_backend();

/// Switch the active backend. Returns false (and leaves the backend
/// unchanged) when the requested one is unavailable on this CPU.
bool set_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
/// sum_i (a_i - b_i)^2
double sumsq_diff(const double* a, const double* b, std::size_t n);
/// y <- y + alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
/// sum_i w_i * a_i * b_i
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);

// Reference implementations, always available regardless of backend.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace scalar

}  // namespace storecast::kernels

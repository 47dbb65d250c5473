#include "storecast/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace storecast::kernels {

#if defined(STORECAST_HAVE_AVX2_TU)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_supported() {
#if defined(STORECAST_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

Backend detect_backend() {
  if (const char* env = std::getenv("STORECAST_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::Avx2;
    // "auto" and anything unrecognized fall through to the probe
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect_backend()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported()) return false;
  backend_slot().store(b, std::memory_order_relaxed);
  return true;
}

#if defined(STORECAST_HAVE_AVX2_TU)
#define STORECAST_DISPATCH(fn, ...)                              \
  (active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__)    \
                                     : scalar::fn(__VA_ARGS__))
#else
#define STORECAST_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
  return STORECAST_DISPATCH(dot, a, b, n);
}
double sum(const double* x, std::size_t n) { return STORECAST_DISPATCH(sum, x, n); }
double sumsq(const double* x, std::size_t n) { return STORECAST_DISPATCH(sumsq, x, n); }
double sumsq_diff(const double* a, const double* b, std::size_t n) {
  return STORECAST_DISPATCH(sumsq_diff, a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  STORECAST_DISPATCH(axpy, alpha, x, y, n);
}
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  return STORECAST_DISPATCH(weighted_dot, w, a, b, n);
}

#undef STORECAST_DISPATCH

}  // namespace storecast::kernels

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kflow/error.hpp"
#include "kflow/simd/stencil_kernels.hpp"

namespace kflow::simd {

namespace {

Backend detect() {
  const char* env = std::getenv("KFLOW_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool avx2_available() {
#if KFLOW_SIMD_X86 && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_available())
    throw ConfigError("AVX2 backend requested but not supported by this CPU");
  current().store(backend, std::memory_order_relaxed);
}

const char* backend_name(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

void periodic_derivatives_2d(const double* f, std::size_t nx, std::size_t ny, double h, Derivs2D out) {
#if KFLOW_SIMD_X86
  if (active_backend() == Backend::avx2) return avx2::periodic_derivatives_2d(f, nx, ny, h, out);
#endif
  scalar::periodic_derivatives_2d(f, nx, ny, h, out);
}

double weighted_sum(const double* values, const double* weights, std::size_t n) {
#if KFLOW_SIMD_X86
  if (active_backend() == Backend::avx2) return avx2::weighted_sum(values, weights, n);
#endif
  return scalar::weighted_sum(values, weights, n);
}

}  // namespace kflow::simd

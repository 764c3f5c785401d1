#pragma once

#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#define KFLOW_SIMD_X86 1
#else
#define KFLOW_SIMD_X86 0
#endif

namespace kflow::simd {

enum class Backend { scalar, avx2 };

/// Output buffers for periodic_derivatives_2d, each nx*ny long (row-major,
/// index j*nx + i).
struct Derivs2D {
  double* dx;
  double* dy;
  double* dxx;
  double* dyy;
  double* dxy;
};

/// Fourth-order centred first/second derivatives on a periodic nx x ny
/// grid with uniform spacing h in both directions; dxy = Dx(Dy f).
/// Requires nx, ny >= 5.
using DerivativeKernel = void (*)(const double* f, std::size_t nx, std::size_t ny, double h,
                                  Derivs2D out);
using WeightedSumKernel = double (*)(const double* values, const double* weights, std::size_t n);

namespace scalar {
void periodic_derivatives_2d(const double* f, std::size_t nx, std::size_t ny, double h, Derivs2D out);
double weighted_sum(const double* values, const double* weights, std::size_t n);
}  // namespace scalar

#if KFLOW_SIMD_X86
namespace avx2 {
void periodic_derivatives_2d(const double* f, std::size_t nx, std::size_t ny, double h, Derivs2D out);
double weighted_sum(const double* values, const double* weights, std::size_t n);
}  // namespace avx2
#endif

bool avx2_available();

/// Backend picked at first use: AVX2 when the CPU supports it, unless the
/// environment variable KFLOW_SIMD=scalar forces the reference kernels.
Backend active_backend();

/// Override the backend (tests). Throws kflow::ConfigError if unsupported.
void set_backend(Backend backend);

const char* backend_name(Backend backend);

void periodic_derivatives_2d(const double* f, std::size_t nx, std::size_t ny, double h, Derivs2D out);
double weighted_sum(const double* values, const double* weights, std::size_t n);

}  // namespace kflow::simd

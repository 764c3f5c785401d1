#include "kflow/simd/stencil_kernels.hpp"

#if KFLOW_SIMD_X86

#include <immintrin.h>

// Operation order mirrors stencil_scalar.cpp exactly (no FMA), so the
// derivative kernels agree bit for bit with the reference.

namespace kflow::simd::avx2 {

namespace {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % nn) + nn) % nn);
}

inline double d1_scalar(const double* f, std::size_t nx, std::size_t i, double inv12h) {
  const auto ii = static_cast<std::ptrdiff_t>(i);
  const double fp1 = f[wrap(ii + 1, nx)], fm1 = f[wrap(ii - 1, nx)];
  const double fp2 = f[wrap(ii + 2, nx)], fm2 = f[wrap(ii - 2, nx)];
  return ((fp1 - fm1) * 8.0 + (fm2 - fp2)) * inv12h;
}

inline double d2_scalar(const double* f, std::size_t nx, std::size_t i, double inv12h2) {
  const auto ii = static_cast<std::ptrdiff_t>(i);
  const double fp1 = f[wrap(ii + 1, nx)], fm1 = f[wrap(ii - 1, nx)];
  const double fp2 = f[wrap(ii + 2, nx)], fm2 = f[wrap(ii - 2, nx)];
  return (((fp1 + fm1) * 16.0 - (fp2 + fm2)) - f[i] * 30.0) * inv12h2;
}

__attribute__((target("avx2"))) inline __m256d d1_vec(__m256d p1, __m256d m1, __m256d p2, __m256d m2,
                                                      __m256d eight, __m256d inv12h) {
  const __m256d a = _mm256_mul_pd(_mm256_sub_pd(p1, m1), eight);
  return _mm256_mul_pd(_mm256_add_pd(a, _mm256_sub_pd(m2, p2)), inv12h);
}

__attribute__((target("avx2"))) inline __m256d d2_vec(__m256d c, __m256d p1, __m256d m1, __m256d p2,
                                                      __m256d m2, __m256d sixteen, __m256d thirty,
                                                      __m256d inv12h2) {
  const __m256d a = _mm256_mul_pd(_mm256_add_pd(p1, m1), sixteen);
  const __m256d b = _mm256_sub_pd(a, _mm256_add_pd(p2, m2));
  return _mm256_mul_pd(_mm256_sub_pd(b, _mm256_mul_pd(c, thirty)), inv12h2);
}

// x-derivatives of one periodic row; interior in blocks of four.
__attribute__((target("avx2"))) void row_x(const double* f, std::size_t nx, double inv12h,
                                           double inv12h2, double* d1, double* d2) {
  const __m256d eight = _mm256_set1_pd(8.0), sixteen = _mm256_set1_pd(16.0);
  const __m256d thirty = _mm256_set1_pd(30.0);
  const __m256d vh = _mm256_set1_pd(inv12h), vh2 = _mm256_set1_pd(inv12h2);
  std::size_t i = 0;
  for (; i < 2 && i < nx; ++i) {
    d1[i] = d1_scalar(f, nx, i, inv12h);
    if (d2) d2[i] = d2_scalar(f, nx, i, inv12h2);
  }
  for (; i + 4 + 2 <= nx; i += 4) {
    const __m256d c = _mm256_loadu_pd(f + i);
    const __m256d p1 = _mm256_loadu_pd(f + i + 1), m1 = _mm256_loadu_pd(f + i - 1);
    const __m256d p2 = _mm256_loadu_pd(f + i + 2), m2 = _mm256_loadu_pd(f + i - 2);
    _mm256_storeu_pd(d1 + i, d1_vec(p1, m1, p2, m2, eight, vh));
    if (d2) _mm256_storeu_pd(d2 + i, d2_vec(c, p1, m1, p2, m2, sixteen, thirty, vh2));
  }
  for (; i < nx; ++i) {
    d1[i] = d1_scalar(f, nx, i, inv12h);
    if (d2) d2[i] = d2_scalar(f, nx, i, inv12h2);
  }
}

}  // namespace

__attribute__((target("avx2"))) void periodic_derivatives_2d(const double* f, std::size_t nx,
                                                             std::size_t ny, double h, Derivs2D out) {
  const double inv12h = 1.0 / (12.0 * h);
  const double inv12h2 = 1.0 / (12.0 * h * h);
  const __m256d eight = _mm256_set1_pd(8.0), sixteen = _mm256_set1_pd(16.0);
  const __m256d thirty = _mm256_set1_pd(30.0);
  const __m256d vh = _mm256_set1_pd(inv12h), vh2 = _mm256_set1_pd(inv12h2);
  for (std::size_t j = 0; j < ny; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double* row = f + j * nx;
    const double* rp1 = f + wrap(jj + 1, ny) * nx;
    const double* rm1 = f + wrap(jj - 1, ny) * nx;
    const double* rp2 = f + wrap(jj + 2, ny) * nx;
    const double* rm2 = f + wrap(jj - 2, ny) * nx;
    row_x(row, nx, inv12h, inv12h2, out.dx + j * nx, out.dxx + j * nx);
    double* dy = out.dy + j * nx;
    double* dyy = out.dyy + j * nx;
    std::size_t i = 0;
    for (; i + 4 <= nx; i += 4) {
      const __m256d c = _mm256_loadu_pd(row + i);
      const __m256d p1 = _mm256_loadu_pd(rp1 + i), m1 = _mm256_loadu_pd(rm1 + i);
      const __m256d p2 = _mm256_loadu_pd(rp2 + i), m2 = _mm256_loadu_pd(rm2 + i);
      _mm256_storeu_pd(dy + i, d1_vec(p1, m1, p2, m2, eight, vh));
      _mm256_storeu_pd(dyy + i, d2_vec(c, p1, m1, p2, m2, sixteen, thirty, vh2));
    }
    for (; i < nx; ++i) {
      dy[i] = ((rp1[i] - rm1[i]) * 8.0 + (rm2[i] - rp2[i])) * inv12h;
      dyy[i] = (((rp1[i] + rm1[i]) * 16.0 - (rp2[i] + rm2[i])) - row[i] * 30.0) * inv12h2;
    }
  }
  for (std::size_t j = 0; j < ny; ++j)
    row_x(out.dy + j * nx, nx, inv12h, inv12h2, out.dxy + j * nx, nullptr);
}

__attribute__((target("avx2"))) double weighted_sum(const double* values, const double* weights,
                                                    std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(values + i), _mm256_loadu_pd(weights + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(values + i + 4),
                                             _mm256_loadu_pd(weights + i + 4)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += values[i] * weights[i];
  return sum;
}

}  // namespace kflow::simd::avx2

#endif

#include "kflow/simd/stencil_kernels.hpp"

#include <vector>

namespace kflow::simd::scalar {

namespace {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % nn) + nn) % nn);
}

// Row-wise first derivative along x of one row.
void row_d1(const double* f, std::size_t nx, double inv12h, double* out) {
  for (std::size_t i = 0; i < nx; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double fp1 = f[wrap(ii + 1, nx)], fm1 = f[wrap(ii - 1, nx)];
    const double fp2 = f[wrap(ii + 2, nx)], fm2 = f[wrap(ii - 2, nx)];
    out[i] = ((fp1 - fm1) * 8.0 + (fm2 - fp2)) * inv12h;
  }
}

}  // namespace

void periodic_derivatives_2d(const double* f, std::size_t nx, std::size_t ny, double h, Derivs2D out) {
  const double inv12h = 1.0 / (12.0 * h);
  const double inv12h2 = 1.0 / (12.0 * h * h);
  for (std::size_t j = 0; j < ny; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double* row = f + j * nx;
    const double* rp1 = f + wrap(jj + 1, ny) * nx;
    const double* rm1 = f + wrap(jj - 1, ny) * nx;
    const double* rp2 = f + wrap(jj + 2, ny) * nx;
    const double* rm2 = f + wrap(jj - 2, ny) * nx;
    row_d1(row, nx, inv12h, out.dx + j * nx);
    for (std::size_t i = 0; i < nx; ++i) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const double fp1 = row[wrap(ii + 1, nx)], fm1 = row[wrap(ii - 1, nx)];
      const double fp2 = row[wrap(ii + 2, nx)], fm2 = row[wrap(ii - 2, nx)];
      out.dxx[j * nx + i] = (((fp1 + fm1) * 16.0 - (fp2 + fm2)) - row[i] * 30.0) * inv12h2;
      out.dy[j * nx + i] = ((rp1[i] - rm1[i]) * 8.0 + (rm2[i] - rp2[i])) * inv12h;
      out.dyy[j * nx + i] = (((rp1[i] + rm1[i]) * 16.0 - (rp2[i] + rm2[i])) - row[i] * 30.0) * inv12h2;
    }
  }
  for (std::size_t j = 0; j < ny; ++j) row_d1(out.dy + j * nx, nx, inv12h, out.dxy + j * nx);
}

double weighted_sum(const double* values, const double* weights, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += values[i] * weights[i];
  return sum;
}

}  // namespace kflow::simd::scalar

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "kflow/base_grid.hpp"
#include "kflow/error.hpp"
#include "kflow/simd/stencil_kernels.hpp"

using namespace kflow;
namespace simd = kflow::simd;

namespace {

struct Buffers {
  explicit Buffers(std::size_t n) : dx(n), dy(n), dxx(n), dyy(n), dxy(n) {}
  simd::Derivs2D view() { return {dx.data(), dy.data(), dxx.data(), dyy.data(), dxy.data()}; }
  std::vector<double> dx, dy, dxx, dyy, dxy;
};

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * unit_uniform(rng()) - 1.0;
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Restores the process-wide backend after each test.
class SimdTest : public ::testing::Test {
 protected:
  void TearDown() override { simd::set_backend(saved_); }
  simd::Backend saved_ = simd::active_backend();
};

}  // namespace

TEST_F(SimdTest, ScalarStencilMatchesFourierSymbol) {
  // A single Fourier mode: centred fourth-order stencils have a known symbol.
  const std::size_t n = 16;
  const double h = 2 * M_PI / n;
  std::vector<double> f(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) f[j * n + i] = std::sin(static_cast<double>(i) * h);
  Buffers out(n * n);
  simd::scalar::periodic_derivatives_2d(f.data(), n, n, h, out.view());
  const double sym1 = (8 * std::sin(h) - std::sin(2 * h)) / (6 * h);
  const double sym2 = (-2 * std::cos(2 * h) + 32 * std::cos(h) - 30) / (12 * h * h);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) * h;
      EXPECT_NEAR(out.dx[j * n + i], sym1 * std::cos(x), 1e-13);
      EXPECT_NEAR(out.dxx[j * n + i], sym2 * std::sin(x), 1e-12);
      EXPECT_NEAR(out.dy[j * n + i], 0.0, 1e-13);
      EXPECT_NEAR(out.dxy[j * n + i], 0.0, 1e-13);
    }
}

TEST_F(SimdTest, Avx2StencilMatchesScalarBitwise) {
#if KFLOW_SIMD_X86
  if (!simd::avx2_available()) GTEST_SKIP() << "CPU lacks AVX2";
  for (auto [nx, ny] : {std::pair<std::size_t, std::size_t>{5, 5}, {8, 8}, {13, 7}, {64, 64}, {67, 31}}) {
    const auto f = noise(nx * ny, nx * 1000 + ny);
    const double h = 0.173;
    Buffers a(nx * ny), b(nx * ny);
    simd::scalar::periodic_derivatives_2d(f.data(), nx, ny, h, a.view());
    simd::avx2::periodic_derivatives_2d(f.data(), nx, ny, h, b.view());
    EXPECT_TRUE(bitwise_equal(a.dx, b.dx)) << nx << 'x' << ny;
    EXPECT_TRUE(bitwise_equal(a.dy, b.dy)) << nx << 'x' << ny;
    EXPECT_TRUE(bitwise_equal(a.dxx, b.dxx)) << nx << 'x' << ny;
    EXPECT_TRUE(bitwise_equal(a.dyy, b.dyy)) << nx << 'x' << ny;
    EXPECT_TRUE(bitwise_equal(a.dxy, b.dxy)) << nx << 'x' << ny;
  }
#else
  GTEST_SKIP() << "not an x86-64 build";
#endif
}

TEST_F(SimdTest, Avx2WeightedSumAgreesToRounding) {
#if KFLOW_SIMD_X86
  if (!simd::avx2_available()) GTEST_SKIP() << "CPU lacks AVX2";
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u, 16384u}) {
    const auto v = noise(n, n), w = noise(n, n + 7);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(v[i] * w[i]);
    const double s = simd::scalar::weighted_sum(v.data(), w.data(), n);
    const double a = simd::avx2::weighted_sum(v.data(), w.data(), n);
    EXPECT_NEAR(s, a, 4 * n * 1.2e-16 * abs_sum) << n;
  }
#else
  GTEST_SKIP() << "not an x86-64 build";
#endif
}

TEST_F(SimdTest, ScalarWeightedSumIsExactOnIntegers) {
  std::vector<double> v(100), w(100);
  for (int i = 0; i < 100; ++i) v[i] = i, w[i] = 2.0;
  EXPECT_EQ(simd::scalar::weighted_sum(v.data(), w.data(), v.size()), 9900.0);
  EXPECT_EQ(simd::scalar::weighted_sum(v.data(), w.data(), 0), 0.0);
}

TEST_F(SimdTest, DispatchFollowsSelectedBackend) {
  simd::set_backend(simd::Backend::scalar);
  EXPECT_EQ(simd::active_backend(), simd::Backend::scalar);
  EXPECT_STREQ(simd::backend_name(simd::Backend::scalar), "scalar");
  const auto v = noise(37, 1), w = noise(37, 2);
  EXPECT_EQ(simd::weighted_sum(v.data(), w.data(), 37), simd::scalar::weighted_sum(v.data(), w.data(), 37));
  if (simd::avx2_available()) {
    simd::set_backend(simd::Backend::avx2);
    EXPECT_EQ(simd::active_backend(), simd::Backend::avx2);
  } else {
    EXPECT_THROW(simd::set_backend(simd::Backend::avx2), ConfigError);
  }
}

// The whole derivative pipeline gives identical results under either backend.
TEST_F(SimdTest, FieldDerivativesIndependentOfBackend) {
  if (!simd::avx2_available()) GTEST_SKIP() << "CPU lacks AVX2";
  const auto g = make_grid({GridMode::torus2d, 48, 2 * M_PI, 2, 1.0, 0});
  const auto field = random_low_frequency_field(g, 5);
  simd::set_backend(simd::Backend::scalar);
  const auto a = differentiate(field);
  simd::set_backend(simd::Backend::avx2);
  const auto b = differentiate(field);
  EXPECT_TRUE(bitwise_equal(a.h11, b.h11));
  EXPECT_TRUE(bitwise_equal(a.h12, b.h12));
  EXPECT_TRUE(bitwise_equal(a.laplacian, b.laplacian));
}

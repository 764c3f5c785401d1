#include <gtest/gtest.h>

#include <cmath>

#include "kflow/error.hpp"
#include "kflow/hypersurface.hpp"

using namespace kflow;

namespace {

constexpr double kTorusTheta = 4 * M_PI * M_PI;

struct Background {
  std::shared_ptr<const BaseGrid> grid;
  std::shared_ptr<const WarpTable> warp;
};

Background torus_background(int res = 64, double m = 0.5) {
  return {make_grid({GridMode::torus2d, res, 2 * M_PI, 2, kTorusTheta, 0}),
          std::make_shared<const WarpTable>(WarpTable::build(SpaceParams::make(3, 0, m, kTorusTheta)))};
}

Background sphere_background(int n, int res = 96, double m = 0.5) {
  const double theta = sphere_area(n - 1);
  return {make_grid({GridMode::sphere_axisym, res, 0.0, n - 1, theta, 1}),
          std::make_shared<const WarpTable>(WarpTable::build(SpaceParams::make(n, 1, m, theta)))};
}

Background symmetric_background(int n, int kappa, double m, double theta) {
  return {make_grid({GridMode::symmetric, 8, 0.0, n - 1, theta, kappa}),
          std::make_shared<const WarpTable>(WarpTable::build(SpaceParams::make(n, kappa, m, theta)))};
}

void expect_slice_closed_forms(const Background& bg, double level) {
  const SpaceParams& p = bg.warp->params();
  const int n = p.n;
  const auto geo = compute_geometry(slice_surface(bg.grid, bg.warp, bg.warp->radius_of(level)));
  const auto w = warp_derivatives(p, bg.warp->rho0(), level);
  const double ln1 = std::pow(level, n - 1);
  const double tol = 1e-11;
  EXPECT_NEAR(geo.f.area, ln1 * p.theta, tol * ln1 * p.theta);
  EXPECT_NEAR(geo.f.H_min, (n - 1) * w.d_lambda / level, tol);
  EXPECT_NEAR(geo.f.H_max, (n - 1) * w.d_lambda / level, tol);
  EXPECT_NEAR(geo.f.int_VH, (n - 1) * w.d_lambda * w.d_lambda * std::pow(level, n - 2) * p.theta,
              tol * geo.f.int_VH);
  EXPECT_NEAR(geo.f.int_p, w.dd_lambda * ln1 * p.theta, tol * geo.f.int_p);
  EXPECT_NEAR(geo.f.J, (std::pow(level, n) - std::pow(bg.warp->rho0(), n)) * p.theta, tol * geo.f.int_p);
  EXPECT_NEAR(geo.f.Q1, q1_limit(n, p.kappa, p.theta), 1e-10 * std::max(1.0, std::abs(geo.f.Q1)));
  for (const Deficit& d : {minkowski_deficit(geo), thm41_deficit(geo), heintze_karcher_deficit(geo),
                           divergence_identity_residual(geo)})
    EXPECT_LE(std::abs(d.value), 1e-8 * d.scale);
}

}  // namespace

TEST(Hypersurface, TorusSlicesMatchClosedForms) {
  const auto bg = torus_background();
  for (double level : {1.5, 2.0, 4.0}) expect_slice_closed_forms(bg, level);
}

TEST(Hypersurface, SphereSlicesMatchClosedForms) {
  for (int n : {3, 4}) {
    const auto bg = sphere_background(n);
    for (double level : {1.5, 2.0, 4.0}) expect_slice_closed_forms(bg, level);
  }
}

TEST(Hypersurface, SymmetricSlicesMatchClosedForms) {
  expect_slice_closed_forms(symmetric_background(3, -1, 0.0, 4 * M_PI), 2.0);
  expect_slice_closed_forms(symmetric_background(5, -1, -0.03, 3.0), 1.5);
  expect_slice_closed_forms(symmetric_background(4, 0, 0.5, 2.0), 4.0);
}

TEST(Hypersurface, SliceFormsAreUmbilic) {
  const auto bg = torus_background(16);
  const auto geo = compute_geometry(slice_surface(bg.grid, bg.warp, bg.warp->radius_of(2.0)));
  const auto f = geo.forms(3);
  const double lam = 2.0, dl = geo.d_lambda[3];
  EXPECT_NEAR(f.g[0], lam * lam, 1e-13);
  EXPECT_NEAR(f.g[1], 0.0, 1e-13);
  EXPECT_NEAR(f.h[0], lam * dl, 1e-13);
  EXPECT_NEAR(f.h[3], lam * dl, 1e-13);
}

// H is the trace of g^{-1} h assembled from the induced forms.
TEST(Hypersurface, MeanCurvatureIsTraceOfShapeOperator) {
  for (const auto& bg : {torus_background(32), sphere_background(3, 64), sphere_background(4, 64),
                         symmetric_background(5, -1, 0.2, 3.0)}) {
    const auto s = random_star_shaped(bg.grid, bg.warp, 7, 0.1, bg.warp->radius_of(2.0));
    const auto geo = compute_geometry(s);
    for (std::size_t i = 0; i < geo.size(); i += 5) {
      const auto f = geo.forms(i);
      const double det = f.g[0] * f.g[3] - f.g[1] * f.g[2];
      const double tr = (f.g[3] * f.h[0] - f.g[1] * f.h[2] - f.g[2] * f.h[1] + f.g[0] * f.h[3]) / det;
      EXPECT_NEAR(tr + f.tan_multiplicity * f.h_tan / f.g_tan, geo.H[i], 1e-12 * geo.H[i]);
    }
  }
}

// First variation of area: d/de |S(u + e phi)| = int H phi lambda^(n-1) dmu.
TEST(Hypersurface, MeanCurvatureIsFirstVariationOfArea) {
  for (const auto& bg : {torus_background(64), sphere_background(3, 128)}) {
    const auto s = random_star_shaped(bg.grid, bg.warp, 3, 0.08, bg.warp->radius_of(2.0));
    const auto geo = compute_geometry(s);
    const auto phi = random_low_frequency_field(bg.grid, 99);
    auto shifted = [&](double e) {
      std::vector<double> u = s.u.values;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += e * phi[i];
      return compute_geometry(GraphSurface(ScalarField(bg.grid, u), bg.warp)).f.area;
    };
    const double e = 1e-4;
    const double fd = (shifted(e) - shifted(-e)) / (2 * e);
    std::vector<double> dens(geo.size());
    for (std::size_t i = 0; i < dens.size(); ++i)
      dens[i] = geo.H[i] * phi[i] * std::pow(geo.lambda[i], geo.n - 1);
    const double exact = integrate(*bg.grid, dens);
    EXPECT_NEAR(fd, exact, 1e-5 * std::abs(geo.f.area));
  }
}

TEST(HypersurfaceProperty, DeficitsNonnegativeOnRandomSurfaces) {
  const auto torus = torus_background(48);
  const auto sphere = sphere_background(3, 64);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    for (const auto* bg : {&torus, &sphere}) {
      const auto s = random_star_shaped(bg->grid, bg->warp, seed, 0.15, bg->warp->radius_of(1.5 + 0.2 * seed));
      const auto geo = compute_geometry(s);
      for (const Deficit& d : {minkowski_deficit(geo), thm41_deficit(geo), heintze_karcher_deficit(geo)})
        EXPECT_GE(d.value, -1e-7 * d.scale) << seed;
      const Deficit div = divergence_identity_residual(geo);
      EXPECT_LE(std::abs(div.value), 1e-6 * div.scale) << seed;
      // Q1 on any star-shaped surface bounds its liminf value from above.
      EXPECT_GE(geo.f.Q1, q1_limit(3, bg->warp->params().kappa, bg->warp->params().theta) - 1e-9);
    }
  }
}

TEST(Hypersurface, DimpleViolatesMeanConvexity) {
  const auto bg = torus_background(64);
  const double r0 = bg.warp->radius_of(2.0);
  std::vector<double> u(bg.grid->size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double dx = bg.grid->x[i] - M_PI, dy = bg.grid->y[i] - M_PI;
    u[i] = r0 - 0.6 * std::exp(-(dx * dx + dy * dy) / 0.1);
  }
  const GraphSurface s(ScalarField(bg.grid, u), bg.warp);
  try {
    compute_geometry(s);
    FAIL() << "expected MeanConvexityError";
  } catch (const MeanConvexityError& e) {
    ASSERT_FALSE(e.nodes.empty());
    const auto geo = compute_geometry_unchecked(s);
    for (auto i : e.nodes) EXPECT_LE(geo.H[i], 0.0);
  }
}

TEST(Hypersurface, ConstructorChecksPairingAndRange) {
  const auto bg = torus_background(16);
  const auto sphere = sphere_background(3, 16);
  EXPECT_THROW(GraphSurface(ScalarField::constant(bg.grid, 1.0), sphere.warp), ConfigError);
  EXPECT_THROW(GraphSurface(ScalarField::constant(bg.grid, 30.0), bg.warp), DomainError);
  EXPECT_THROW(GraphSurface(ScalarField::constant(bg.grid, 0.0), bg.warp), DomainError);
  EXPECT_THROW(random_star_shaped(bg.grid, bg.warp, 0, 0.3, 1.0), DomainError);
}

TEST(Hypersurface, RandomSurfaceIsSeedDeterministic) {
  const auto bg = torus_background(32);
  const auto a = random_star_shaped(bg.grid, bg.warp, 5, 0.1, 1.0);
  const auto b = random_star_shaped(bg.grid, bg.warp, 5, 0.1, 1.0);
  EXPECT_EQ(a.u.values, b.u.values);
}

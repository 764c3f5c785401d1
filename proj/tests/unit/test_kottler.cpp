#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kflow/base_grid.hpp"
#include "kflow/error.hpp"
#include "kflow/kottler.hpp"

using namespace kflow;

namespace {

// Real root of rho^3 + rho - 2m (kappa = 1, n = 3) by Cardano.
double cardano_root(double m) {
  const double q = -2.0 * m, disc = std::sqrt(q * q / 4.0 + 1.0 / 27.0);
  return std::cbrt(-q / 2.0 + disc) + std::cbrt(-q / 2.0 - disc);
}

}  // namespace

TEST(Kottler, FlatHorizonMatchesClosedForm) {
  for (int n : {3, 4, 5, 7}) {
    for (double m : {1e-6, 0.3, 2.0, 1e4}) {
      const auto h = find_horizon(SpaceParams::make(n, 0, m, 1.0));
      EXPECT_NEAR(h.rho0, std::pow(2.0 * m, 1.0 / n), 1e-13 * h.rho0) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Kottler, SphericalHorizonMatchesCardano) {
  for (double m : {1e-3, 0.5, 1.0, 40.0}) {
    const auto h = find_horizon(SpaceParams::make(3, 1, m, 4 * M_PI));
    EXPECT_NEAR(h.rho0, cardano_root(m), 1e-13 * std::max(1.0, h.rho0));
  }
}

TEST(Kottler, HyperbolicZeroMassHorizonIsOne) {
  EXPECT_DOUBLE_EQ(find_horizon(SpaceParams::make(4, -1, 0.0, 2.0)).rho0, 1.0);
}

TEST(Kottler, CriticalMassGivesDoubleRoot) {
  for (int n : {3, 4, 5}) {
    const double mc = critical_mass(n);
    EXPECT_NEAR(mc, -std::pow(n - 2.0, (n - 2.0) / 2) / std::pow(n, n / 2.0), 1e-16);
    const auto h = find_horizon(SpaceParams::make(n, -1, mc, 1.0));
    EXPECT_NEAR(h.rho0, std::sqrt((n - 2.0) / n), 1e-6);
  }
  EXPECT_NEAR(critical_mass(3), -1.0 / (3.0 * std::sqrt(3.0)), 1e-16);
}

TEST(Kottler, NegativeMassPicksLargestRoot) {
  const SpaceParams p = SpaceParams::make(3, -1, -0.1, 1.0);
  const double rho0 = find_horizon(p).rho0;
  EXPECT_NEAR(horizon_polynomial(p, rho0), 0.0, 1e-12);
  // No root beyond rho0: the polynomial stays positive.
  for (double rho = rho0 * 1.001; rho < 10; rho *= 1.1) EXPECT_GT(horizon_polynomial(p, rho), 0.0);
}

TEST(Kottler, RejectsInvalidParameters) {
  EXPECT_THROW(SpaceParams::make(2, 0, 1.0, 1.0), InvalidDimensionError);
  EXPECT_THROW(SpaceParams::make(3, 2, 1.0, 1.0), DomainError);
  EXPECT_THROW(SpaceParams::make(3, 0, 1.0, -1.0), DomainError);
  EXPECT_THROW(SpaceParams::make(3, 0, 0.0, 1.0), NoHorizonError);
  EXPECT_THROW(SpaceParams::make(3, 1, -0.1, 1.0), NoHorizonError);
  EXPECT_THROW(SpaceParams::make(3, -1, critical_mass(3) - 1e-6, 1.0), NoHorizonError);
  EXPECT_THROW(SpaceParams::make(3, 0, std::nan(""), 1.0), DomainError);
}

TEST(Kottler, PotentialVanishesAtHorizonAndIsCheckedBelow) {
  const SpaceParams p = SpaceParams::make(4, 1, 0.8, sphere_area(3));
  const double rho0 = find_horizon(p).rho0;
  EXPECT_NEAR(potential(p, rho0), 0.0, 1e-6);
  EXPECT_NEAR(potential(p, 3.0), std::sqrt(9.0 + 1.0 - 1.6 / 9.0), 1e-15);
  EXPECT_THROW(potential(p, 0.5 * rho0), DomainError);
}

TEST(Kottler, HyperbolicLimitHasNoHorizon) {
  const SpaceParams p = SpaceParams::hyperbolic_limit(3, 4 * M_PI);
  EXPECT_EQ(find_horizon(p).rho0, 0.0);
  EXPECT_DOUBLE_EQ(potential(p, 2.0), std::sqrt(5.0));
}

// Property: horizon area determines the mass.
TEST(KottlerProperty, HorizonMassRoundTrip) {
  std::mt19937_64 rng(20261015);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(unit_uniform(rng()) * 3);
    const int kappa = static_cast<int>(unit_uniform(rng()) * 3) - 1;
    const double theta = 0.5 + 20.0 * unit_uniform(rng());
    double m = std::exp(-6.0 + 12.0 * unit_uniform(rng()));
    if (kappa == -1 && trial % 2) m = critical_mass(n) * unit_uniform(rng());
    const SpaceParams p = SpaceParams::make(n, kappa, m, theta);
    const auto h = find_horizon(p);
    const double recovered = mass_from_horizon_area(h.horizon_area, n, kappa, theta);
    EXPECT_NEAR(recovered, m, 1e-10 * std::max(std::abs(m), 1e-3)) << n << ' ' << kappa << ' ' << m;
  }
}

// The graph profile must induce the Kottler metric of mass m_graph:
// 1/V_b^2 + V_b^2 f'^2 = 1/V_g^2.
TEST(Kottler, GraphProfileInducesTargetMetric) {
  for (int kappa : {-1, 0, 1}) {
    const SpaceParams base = SpaceParams::make(3, kappa, kappa == -1 ? 0.0 : 0.5, 1.0);
    const auto prof = kottler_graph_profile(base, 1.25);
    SpaceParams graph = base;
    graph.m = 1.25;
    for (double rho = prof.rho_start * 1.01; rho < 300; rho *= 1.37) {
      const double vb2 = horizon_polynomial(base, rho), vg2 = horizon_polynomial(graph, rho);
      const double fp = prof.f_prime(rho);
      EXPECT_NEAR(1.0 / vb2 + vb2 * fp * fp, 1.0 / vg2, 1e-12 / vg2) << rho;
      // Central difference of f' against the closed-form f''.
      const double h = 1e-5 * rho;
      const double fd = (prof.f_prime(rho + h) - prof.f_prime(rho - h)) / (2 * h);
      EXPECT_NEAR(prof.f_second(rho), fd, 1e-6 * std::abs(fd) + 1e-14);
    }
  }
}

TEST(Kottler, GraphBelowBaseMassIsRejected) {
  EXPECT_THROW(kottler_graph_profile(SpaceParams::make(3, 0, 0.5, 1.0), 0.4), NonRepresentableGraphError);
}

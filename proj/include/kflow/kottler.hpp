#pragma once

#include <functional>

namespace kflow {

/// Parameters of a Kottler-Schwarzschild background.
///
/// `theta` is the area of the closed fibre (N, g_hat): 4*pi for the unit
/// sphere, L^2 for a flat torus of side L, 4*pi*(g-1) for a genus-g
/// hyperbolic surface.
struct SpaceParams {
  int n = 3;
  int kappa = 0;
  double m = 0.5;
  double theta = 1.0;
  // Only set by hyperbolic_limit(): kappa = 1 with m = 0 and no horizon.
  bool degenerate_horizon = false;

  /// Builds and validates a parameter set.
  static SpaceParams make(int n, int kappa, double m, double theta);

  /// kappa = 1, m = 0: hyperbolic space (horizon collapses to rho0 = 0).
  static SpaceParams hyperbolic_limit(int n, double theta);

  /// Throws InvalidDimensionError / DomainError / NoHorizonError.
  void validate() const;

  /// Normalising constant 1 / (2 (n-1) theta) of the mass integral.
  double mass_constant() const { return 1.0 / (2.0 * (n - 1) * theta); }
};

/// -(n-2)^((n-2)/2) / n^(n/2): the smallest admissible mass for kappa = -1.
double critical_mass(int n);

/// rho^2 + kappa - 2 m rho^(2-n), the square of the static potential.
double horizon_polynomial(const SpaceParams& params, double rho);

struct HorizonData {
  double rho0 = 0.0;
  double horizon_area = 0.0;
  // 1/2((A/theta)^(n/(n-1)) + kappa (A/theta)^((n-2)/(n-1))), should equal m.
  double horizon_mass_check = 0.0;
};

/// Largest positive root of the horizon polynomial.
HorizonData find_horizon(const SpaceParams& params);

/// Static potential V = sqrt(rho^2 + kappa - 2 m rho^(2-n)); requires rho >= rho0.
double potential(const SpaceParams& params, double rho);

/// Same as potential() without the domain check; clamps tiny negative radicands.
double potential_unchecked(const SpaceParams& params, double rho);

/// Mass of the Kottler space whose horizon has the given area.
double mass_from_horizon_area(double area, int n, int kappa, double theta);

/// Radial profile f(rho) realising the Kottler space of mass m_graph as a
/// graph over the Kottler space of mass m_base.
struct RadialProfilePair {
  double m_base = 0.0;
  double m_graph = 0.0;
  double rho_start = 0.0;  // horizon of the graph space
  std::function<double(double)> f_prime;
  std::function<double(double)> f_second;
};

/// Throws NonRepresentableGraphError when m_graph < base.m.
RadialProfilePair kottler_graph_profile(const SpaceParams& base, double m_graph);

}  // namespace kflow

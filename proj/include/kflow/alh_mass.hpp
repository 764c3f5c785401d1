#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kflow/kottler.hpp"

namespace kflow {

/// Mass function M(rho) = m_in + (m_inf - m_in)(1 - (rho_in / rho)^q) with
/// m_in = 1/2 (rho_in^n + kappa rho_in^(n-2)), so that the induced metric
/// d rho^2 / (rho^2 + kappa - 2 M rho^(2-n)) + rho^2 g_hat has a minimal
/// boundary at rho_in.
struct MassFunctionSpec {
  double rho_in = 1.0;
  double m_inf = 1.0;
  double q = 2.0;
};

/// Radial graph t = f(rho) over a Kottler background: the induced metric is
/// the background metric plus V^2 f'^2 d rho^2.
struct RadialGraph {
  enum class Kind { kottler, mass_function, custom };

  Kind kind = Kind::custom;
  SpaceParams base;
  double base_rho0 = 0.0;
  double rho_inner = 0.0;
  double tau = 0.0;            // decay order of the perturbation
  bool horizon_type = false;   // f' blows up at rho_inner
  double m_graph = 0.0;        // kottler: graph mass; mass_function: m_inf
  MassFunctionSpec mass_function;
  std::function<double(double)> f_prime;
  std::function<double(double)> f_second;

  /// The Kottler space of mass m_graph as a graph over `base`.
  static RadialGraph kottler(const SpaceParams& base, double m_graph);

  /// Throws NonRepresentableGraphError unless M >= m and the induced
  /// potential stays positive beyond rho_in.
  static RadialGraph from_mass_function(const SpaceParams& base, const MassFunctionSpec& spec);

  static RadialGraph custom(const SpaceParams& base, std::function<double(double)> f_prime,
                            std::function<double(double)> f_second, double rho_inner, double tau,
                            bool horizon_type);

  /// M(rho) and M'(rho) of a mass-function (or Kottler) graph.
  double mass_function_value(double rho) const;
  double mass_function_slope(double rho) const;
};

/// Boundary integral of the mass over the coordinate sphere {rho} x N,
/// plus the background mass.
double mass_integrand(const RadialGraph& graph, double rho);

struct MassEstimate {
  std::vector<std::pair<double, double>> samples;
  double mass = 0.0;
  double error_estimate = 0.0;
  double fitted_exponent = 0.0;  // p in integrand = mass + A rho^(-p)
  double fitted_tau = 0.0;       // decay of V^4 f'^2
  bool exact = false;            // samples agree to rounding
};

/// Extrapolation of the last three samples assuming integrand = mass + A rho^(-p).
/// Throws DecayViolationError for non-convergent samples or tau <= n/2.
MassEstimate mass_limit(const RadialGraph& graph, const std::vector<double>& rho_schedule = {50.0, 100.0, 200.0});

struct ShapeOperator {
  double kappa_rad = 0.0;
  double kappa_tan = 0.0;  // multiplicity n-1
  double S2 = 0.0;
};

ShapeOperator radial_shape_operator(const RadialGraph& graph, double rho);

struct MassIdentity {
  double lhs_mass = 0.0;
  double rhs_mass = 0.0;
  double residual = 0.0;
  double bulk = 0.0;
  double boundary = 0.0;
  double base_mass = 0.0;
  double min_S2 = 0.0;  // smallest S2 seen by the bulk quadrature
};

/// Compares the extrapolated mass with m + bulk S2 term + boundary term.
MassIdentity mass_identity_check(const RadialGraph& graph,
                                 const std::vector<double>& rho_schedule = {1e3, 2e3, 4e3});

double penrose_deficit(double mass, double sigma_area, const SpaceParams& params);

/// Area of the inner boundary {rho_inner} x N.
double inner_boundary_area(const RadialGraph& graph);

}  // namespace kflow

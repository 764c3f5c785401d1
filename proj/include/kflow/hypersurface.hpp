#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "kflow/base_grid.hpp"
#include "kflow/warp_table.hpp"

namespace kflow {

/// Star-shaped hypersurface {(u(x), x) : x in N}, u the r coordinate.
struct GraphSurface {
  ScalarField u;
  std::shared_ptr<const WarpTable> warp;

  GraphSurface() = default;
  /// Checks u > 0 (or u >= 0 when rho0 = 0 is excluded), u <= r_max, and
  /// that grid and background agree on kappa, theta and dimension.
  GraphSurface(ScalarField u_field, std::shared_ptr<const WarpTable> warp_table);

  const BaseGrid& grid() const { return *u.grid; }
  int n() const { return warp->params().n; }
};

struct SurfaceFunctionals {
  double area = 0.0;
  double int_VH = 0.0;
  double int_p = 0.0;
  double int_V_over_H = 0.0;
  double J = 0.0;
  double K = 0.0;
  double Q1 = 0.0;
  double Q2 = 0.0;
  double H_min = 0.0;
  double H_max = 0.0;
  double grad_sup = 0.0;  // sup |grad_ghat phi|
  double u_min = 0.0;
  double u_max = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Induced metric and second fundamental form at one node, in a
/// g_hat-orthonormal frame. Directions 1, 2 form the 2x2 blocks (on the
/// sphere direction 2 is tangent to the symmetry orbits); the remaining
/// n - 3 directions are diagonal with entries g_tan, h_tan.
struct InducedForms {
  std::array<double, 4> g{};  // row-major 2x2
  std::array<double, 4> h{};
  double g_tan = 0.0;
  double h_tan = 0.0;
  int tan_multiplicity = 0;
};

struct SurfaceGeometry {
  int n = 3;
  int tan_multiplicity = 0;
  double rho0 = 0.0;
  double theta = 1.0;
  int kappa = 0;

  std::vector<double> lambda, d_lambda, dd_lambda;
  std::vector<double> phi1, phi2, phi11, phi12, phi22, phi_tan;
  std::vector<double> v;
  std::vector<double> H;
  std::vector<double> p;             // support function lambda''/v
  std::vector<double> chi;           // v / lambda
  std::vector<double> area_element;  // lambda^(n-1) v

  SurfaceFunctionals f;

  std::size_t size() const { return H.size(); }
  InducedForms forms(std::size_t node) const;
  /// Largest eigenvalue of g_tilde^{ij} / (lambda^2 H^2): the diffusion
  /// coefficient of the linearised flow for u.
  double diffusion_max() const;
};

/// Geometry without the mean-convexity check (H may be <= 0).
SurfaceGeometry compute_geometry_unchecked(const GraphSurface& surface);

/// Throws MeanConvexityError listing the nodes where H <= 0.
SurfaceGeometry compute_geometry(const GraphSurface& surface);

struct Deficit {
  double value = 0.0;
  double scale = 0.0;  // largest term in absolute value
};

Deficit minkowski_deficit(const SurfaceGeometry& geom);
Deficit thm41_deficit(const SurfaceGeometry& geom);
Deficit heintze_karcher_deficit(const SurfaceGeometry& geom);
Deficit divergence_identity_residual(const SurfaceGeometry& geom);

/// Value of Q1 on every slice and the liminf bound along the flow.
double q1_limit(int n, int kappa, double theta);

/// u = base_r (1 + amplitude P) with P from random_low_frequency_field;
/// amplitude is halved (up to 8 times) until H > 0. amplitude <= 0.2.
GraphSurface random_star_shaped(std::shared_ptr<const BaseGrid> grid,
                                std::shared_ptr<const WarpTable> warp, std::uint64_t seed,
                                double amplitude, double base_r);

GraphSurface slice_surface(std::shared_ptr<const BaseGrid> grid,
                           std::shared_ptr<const WarpTable> warp, double r);

}  // namespace kflow

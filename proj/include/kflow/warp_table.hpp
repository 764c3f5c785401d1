#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "kflow/kottler.hpp"

namespace kflow {

struct WarpSample {
  double lambda = 0.0;
  double d_lambda = 0.0;
  double dd_lambda = 0.0;
};

/// The warp factor lambda(r) of the background, i.e. the inverse of
/// r(rho) = int_{rho0}^{rho} ds / V(s), tabulated on a uniform r grid.
///
/// Values between nodes come from quintic Hermite interpolation of lambda
/// using the exact first and second derivatives at the nodes. lambda' and
/// lambda'' are always evaluated from their closed forms at the
/// interpolated lambda.
class WarpTable {
 public:
  static WarpTable build(const SpaceParams& params, double r_max = 25.0, double tol = 1e-12,
                         std::size_t nodes = 4000);

  double lambda(double r) const;
  WarpSample eval(double r) const;

  /// Inverse of lambda: the r coordinate of the level set {rho} x N.
  double radius_of(double rho) const;

  const SpaceParams& params() const { return params_; }
  double rho0() const { return rho0_; }
  double r_max() const { return r_.back(); }
  double spacing() const { return h_; }
  std::size_t size() const { return r_.size(); }

  const std::vector<double>& r_grid() const { return r_; }
  const std::vector<double>& lambda_grid() const { return lambda_; }
  const std::vector<double>& d_lambda_grid() const { return d_lambda_; }
  const std::vector<double>& dd_lambda_grid() const { return dd_lambda_; }

  /// Largest |lambda'^2 - (kappa + lambda^2 - 2 m lambda^(2-n))| relative to
  /// max(1, lambda^2) over the nodes.
  double identity_residual() const;

  /// Two-column (r, lambda) CSV.
  void write_csv(std::ostream& out) const;

 private:
  WarpTable() = default;
  double xi_integral(double xi_a, double xi_b) const;

  SpaceParams params_;
  double rho0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> r_;
  std::vector<double> xi_;
  std::vector<double> lambda_;
  std::vector<double> d_lambda_;
  std::vector<double> dd_lambda_;
};

/// lambda'(rho) and lambda''(rho) written as functions of rho = lambda.
WarpSample warp_derivatives(const SpaceParams& params, double rho0, double rho);

struct CurvatureDeviation {
  double riem_dev = 0.0;
  double ric_dev = 0.0;
  // Sectional curvatures + 1 for a plane tangent to N and a radial plane.
  double tangential = 0.0;
  double radial = 0.0;
};

/// Deviation of the background curvature from constant curvature -1 at r.
CurvatureDeviation curvature_deviation(const SpaceParams& params, const WarpTable& warp, double r);

}  // namespace kflow

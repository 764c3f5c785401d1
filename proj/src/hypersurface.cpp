#include "kflow/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kflow/error.hpp"

namespace kflow {

GraphSurface::GraphSurface(ScalarField u_field, std::shared_ptr<const WarpTable> warp_table)
    : u(std::move(u_field)), warp(std::move(warp_table)) {
  if (!warp) throw DomainError("graph surface without a warp table");
  const SpaceParams& p = warp->params();
  const BaseGrid& g = *u.grid;
  if (g.kappa != p.kappa)
    throw ConfigError("grid kappa " + std::to_string(g.kappa) + " differs from space kappa " +
                          std::to_string(p.kappa),
                      {"space.kappa", "grid.mode"});
  if (std::abs(g.theta - p.theta) > 1e-12 * p.theta)
    throw ConfigError("grid area " + std::to_string(g.theta) + " differs from space theta " +
                          std::to_string(p.theta),
                      {"space.theta"});
  if (g.mode != GridMode::symmetric && g.dim != p.n - 1)
    throw ConfigError("grid dimension " + std::to_string(g.dim) + " does not match n - 1 = " +
                          std::to_string(p.n - 1),
                      {"space.n", "grid.dim"});
  for (double r : u.values) {
    if (!(r > 0.0)) throw DomainError("graph height must be positive (outside the horizon)");
    if (r > warp->r_max()) throw DomainError("graph height " + std::to_string(r) + " beyond r_max");
  }
}

double q1_limit(int n, int kappa, double theta) {
  return (n - 1.0) * kappa * std::pow(theta, 1.0 / (n - 1));
}

SurfaceGeometry compute_geometry_unchecked(const GraphSurface& s) {
  const BaseGrid& grid = s.grid();
  const SpaceParams& params = s.warp->params();
  const int n = params.n;
  const std::size_t count = grid.size();

  SurfaceGeometry geo;
  geo.n = n;
  geo.rho0 = s.warp->rho0();
  geo.theta = grid.theta;
  geo.kappa = params.kappa;
  geo.lambda.resize(count);
  geo.d_lambda.resize(count);
  geo.dd_lambda.resize(count);
  geo.phi1.resize(count);
  geo.phi2.resize(count);
  geo.phi11.resize(count);
  geo.phi12.resize(count);
  geo.phi22.resize(count);
  geo.phi_tan.resize(count);
  geo.v.resize(count);
  geo.H.resize(count);
  geo.p.resize(count);
  geo.chi.resize(count);
  geo.area_element.resize(count);

  const FieldDerivatives du = differentiate(s.u);
  geo.tan_multiplicity = du.tan_multiplicity;

  std::vector<double> vh(count), v_over_h(count), p_dens(count), j_dens(count);
  const double rho0_n = std::pow(geo.rho0, n);
  double grad_sup = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const WarpSample w = s.warp->eval(s.u[i]);
    const double lam = w.lambda, dl = w.d_lambda;
    const double inv = 1.0 / lam;
    const double u1 = du.d1[i], u2 = du.d2[i];
    const double p1 = u1 * inv, p2 = u2 * inv;
    const double shift = dl * inv * inv;
    const double p11 = du.h11[i] * inv - shift * u1 * u1;
    const double p12 = du.h12[i] * inv - shift * u1 * u2;
    const double p22 = du.h22[i] * inv - shift * u2 * u2;
    const double pt = du.tan[i] * inv;
    const double grad2 = p1 * p1 + p2 * p2;
    const double v = std::sqrt(1.0 + grad2);
    const double iv2 = 1.0 / (v * v);
    const double trace = (1.0 - p1 * p1 * iv2) * p11 - 2.0 * p1 * p2 * iv2 * p12 +
                         (1.0 - p2 * p2 * iv2) * p22 + du.tan_multiplicity * pt;
    const double H = ((n - 1) * dl - trace) / (lam * v);
    const double lam_n1 = std::pow(lam, n - 1);

    geo.lambda[i] = lam;
    geo.d_lambda[i] = dl;
    geo.dd_lambda[i] = w.dd_lambda;
    geo.phi1[i] = p1;
    geo.phi2[i] = p2;
    geo.phi11[i] = p11;
    geo.phi12[i] = p12;
    geo.phi22[i] = p22;
    geo.phi_tan[i] = pt;
    geo.v[i] = v;
    geo.H[i] = H;
    geo.p[i] = w.dd_lambda / v;
    geo.chi[i] = v * inv;
    geo.area_element[i] = lam_n1 * v;

    vh[i] = dl * H * lam_n1 * v;
    v_over_h[i] = dl / H * lam_n1 * v;
    p_dens[i] = w.dd_lambda * lam_n1;
    j_dens[i] = lam_n1 * lam - rho0_n;
    grad_sup = std::max(grad_sup, std::sqrt(grad2));
  }

  SurfaceFunctionals& f = geo.f;
  const double theta = grid.theta;
  f.area = integrate(grid, geo.area_element);
  f.int_VH = integrate(grid, vh);
  f.int_p = integrate(grid, p_dens);
  f.int_V_over_H = integrate(grid, v_over_h);
  f.J = integrate(grid, j_dens);
  const double a = f.area / theta;
  f.K = theta * (std::pow(a, n / (n - 1.0)) - rho0_n);
  const double kappa_term = (n - 1.0) * params.kappa * std::pow(geo.rho0, n - 2) * theta;
  f.Q1 = (f.int_VH - (n - 1.0) * f.J + kappa_term) / std::pow(f.area, (n - 2.0) / (n - 1.0));
  f.Q2 = (f.int_VH + 2.0 * (n - 1) * params.m * theta - (n - 1.0) * theta * std::pow(a, n / (n - 1.0))) /
         std::pow(a, (n - 2.0) / (n - 1.0));
  const auto [hmin, hmax] = std::minmax_element(geo.H.begin(), geo.H.end());
  f.H_min = *hmin;
  f.H_max = *hmax;
  f.grad_sup = grad_sup;
  const auto [umin, umax] = std::minmax_element(s.u.values.begin(), s.u.values.end());
  f.u_min = *umin;
  f.u_max = *umax;
  f.lambda_min = geo.lambda[static_cast<std::size_t>(umin - s.u.values.begin())];
  f.lambda_max = geo.lambda[static_cast<std::size_t>(umax - s.u.values.begin())];
  return geo;
}

SurfaceGeometry compute_geometry(const GraphSurface& surface) {
  SurfaceGeometry geo = compute_geometry_unchecked(surface);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < geo.size(); ++i)
    if (!(geo.H[i] > 0.0)) bad.push_back(i);
  if (!bad.empty())
    throw MeanConvexityError("mean curvature is non-positive at " + std::to_string(bad.size()) + " node(s)",
                             std::move(bad));
  return geo;
}

InducedForms SurfaceGeometry::forms(std::size_t i) const {
  InducedForms out;
  const double lam = lambda[i], l2 = lam * lam;
  const double a = phi1[i], b = phi2[i];
  const std::array<double, 4> gh{1.0 + a * a, a * b, a * b, 1.0 + b * b};
  // Sphere and symmetric modes have no second grid direction: direction 2 is
  // then the first orbit direction.
  const double second = tan_multiplicity > 0 ? phi_tan[i] : phi22[i];
  const std::array<double, 4> hess{phi11[i], phi12[i], phi12[i], second};
  const double c = lam / v[i];
  for (int k = 0; k < 4; ++k) {
    out.g[k] = l2 * gh[k];
    out.h[k] = c * (d_lambda[i] * gh[k] - hess[k]);
  }
  out.tan_multiplicity = n - 3;
  out.g_tan = l2;
  out.h_tan = c * (d_lambda[i] - phi_tan[i]);
  return out;
}

double SurfaceGeometry::diffusion_max() const {
  // g_tilde has eigenvalues 1 and 1/v^2.
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double lh = lambda[i] * H[i];
    worst = std::max(worst, 1.0 / (lh * lh));
  }
  return worst;
}

namespace {

double max_abs(std::initializer_list<double> terms) {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m;
}

}  // namespace

Deficit minkowski_deficit(const SurfaceGeometry& g) {
  const int n = g.n;
  const double a = g.f.area / g.theta;
  const double kterm = (n - 1.0) * g.kappa * g.theta *
                       (std::pow(a, (n - 2.0) / (n - 1.0)) - std::pow(g.rho0, n - 2));
  const double aterm = (n - 1.0) * g.theta * (std::pow(a, n / (n - 1.0)) - std::pow(g.rho0, n));
  return {g.f.int_VH - kterm - aterm, max_abs({g.f.int_VH, kterm, aterm})};
}

Deficit thm41_deficit(const SurfaceGeometry& g) {
  const int n = g.n;
  const double a = g.f.area / g.theta;
  const double jterm = (n - 1.0) * g.f.J;
  const double kterm = (n - 1.0) * g.kappa * g.theta *
                       (std::pow(a, (n - 2.0) / (n - 1.0)) - std::pow(g.rho0, n - 2));
  return {g.f.int_VH - jterm - kterm, max_abs({g.f.int_VH, jterm, kterm})};
}

Deficit heintze_karcher_deficit(const SurfaceGeometry& g) {
  const double lhs = (g.n - 1.0) * g.f.int_V_over_H;
  const double rhs = g.f.J + std::pow(g.rho0, g.n) * g.theta;
  return {lhs - rhs, max_abs({lhs, rhs})};
}

Deficit divergence_identity_residual(const SurfaceGeometry& g) {
  const int n = g.n;
  const double constant = (0.5 * n * std::pow(g.rho0, n) + 0.5 * (n - 2) * g.kappa * std::pow(g.rho0, n - 2)) * g.theta;
  return {g.f.int_p - (g.f.J + constant), max_abs({g.f.int_p, g.f.J, constant})};
}

GraphSurface slice_surface(std::shared_ptr<const BaseGrid> grid, std::shared_ptr<const WarpTable> warp,
                           double r) {
  return GraphSurface(ScalarField::constant(std::move(grid), r), std::move(warp));
}

GraphSurface random_star_shaped(std::shared_ptr<const BaseGrid> grid, std::shared_ptr<const WarpTable> warp,
                                std::uint64_t seed, double amplitude, double base_r) {
  if (!(amplitude >= 0.0) || amplitude > 0.2)
    throw DomainError("perturbation amplitude must lie in [0, 0.2]");
  if (!(base_r > 0.0)) throw DomainError("base radius must be positive");
  const ScalarField shape = random_low_frequency_field(grid, seed);
  double amp = amplitude;
  for (int attempt = 0; attempt <= 8; ++attempt) {
    std::vector<double> u(shape.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = base_r * (1.0 + amp * shape[i]);
    GraphSurface surface(ScalarField(grid, std::move(u)), warp);
    try {
      compute_geometry(surface);
      return surface;
    } catch (const MeanConvexityError&) {
      amp *= 0.5;
    }
  }
  throw GenerationError("no mean-convex surface found for seed " + std::to_string(seed));
}

}  // namespace kflow

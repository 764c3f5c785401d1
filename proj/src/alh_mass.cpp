#include "kflow/alh_mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "kflow/error.hpp"

namespace kflow {

namespace {

double d_potential_sq(int n, double mass, double rho) {
  // d/drho (rho^2 + kappa - 2 M rho^(2-n)) for constant M.
  return 2.0 * rho + 2.0 * (n - 2) * mass * std::pow(rho, 1 - n);
}

void check_range(const RadialGraph& g, double rho) {
  if (!(rho > g.rho_inner) || !(rho > g.base_rho0) || !std::isfinite(rho))
    throw DomainError("radius " + std::to_string(rho) + " is not outside the inner boundary " +
                      std::to_string(g.rho_inner));
}

}  // namespace

RadialGraph RadialGraph::kottler(const SpaceParams& base, double m_graph) {
  const RadialProfilePair pair = kottler_graph_profile(base, m_graph);
  RadialGraph g;
  g.kind = Kind::kottler;
  g.base = base;
  g.base_rho0 = find_horizon(base).rho0;
  g.rho_inner = pair.rho_start;
  g.tau = base.n;
  g.horizon_type = m_graph > base.m;
  g.m_graph = m_graph;
  g.f_prime = pair.f_prime;
  g.f_second = pair.f_second;
  if (!g.horizon_type) g.rho_inner = g.base_rho0;
  return g;
}

double RadialGraph::mass_function_value(double rho) const {
  switch (kind) {
    case Kind::kottler: return m_graph;
    case Kind::mass_function: {
      const int n = base.n;
      const double m_in = 0.5 * (std::pow(mass_function.rho_in, n) + base.kappa * std::pow(mass_function.rho_in, n - 2));
      return m_in + (mass_function.m_inf - m_in) * -std::expm1(mass_function.q * std::log(mass_function.rho_in / rho));
    }
    case Kind::custom: break;
  }
  throw DomainError("custom radial graphs carry no mass function");
}

double RadialGraph::mass_function_slope(double rho) const {
  switch (kind) {
    case Kind::kottler: return 0.0;
    case Kind::mass_function: {
      const int n = base.n;
      const double m_in = 0.5 * (std::pow(mass_function.rho_in, n) + base.kappa * std::pow(mass_function.rho_in, n - 2));
      const double q = mass_function.q;
      return (mass_function.m_inf - m_in) * q * std::pow(mass_function.rho_in / rho, q) / rho;
    }
    case Kind::custom: break;
  }
  throw DomainError("custom radial graphs carry no mass function");
}

RadialGraph RadialGraph::from_mass_function(const SpaceParams& base, const MassFunctionSpec& spec) {
  base.validate();
  const int n = base.n;
  RadialGraph g;
  g.kind = Kind::mass_function;
  g.base = base;
  g.base_rho0 = find_horizon(base).rho0;
  g.mass_function = spec;
  g.rho_inner = spec.rho_in;
  g.m_graph = spec.m_inf;
  g.horizon_type = true;
  g.tau = n;
  if (!(spec.q > 0.0)) throw DomainError("mass function exponent q must be positive");
  if (!(spec.rho_in > g.base_rho0))
    throw NonRepresentableGraphError("inner radius must lie outside the background horizon");
  const double m_in = g.mass_function_value(spec.rho_in);
  if (m_in < base.m || spec.m_inf < base.m)
    throw NonRepresentableGraphError("mass function drops below the background mass");

  const double kappa = base.kappa;
  auto vstar2 = [g, kappa, n](double rho) {
    return rho * rho + kappa - 2.0 * g.mass_function_value(rho) * std::pow(rho, 2 - n);
  };
  auto dvstar2 = [g, n](double rho) {
    const double M = g.mass_function_value(rho), dM = g.mass_function_slope(rho);
    return 2.0 * rho + 2.0 * (n - 2) * M * std::pow(rho, 1 - n) - 2.0 * dM * std::pow(rho, 2 - n);
  };
  if (!(dvstar2(spec.rho_in) > 0.0))
    throw NonRepresentableGraphError("induced potential has a degenerate zero at the inner radius");
  for (int k = 1; k <= 4000; ++k) {
    const double rho = spec.rho_in * std::pow(1e6, k / 4000.0);
    if (!(vstar2(rho) > 0.0))
      throw NonRepresentableGraphError("induced potential vanishes at rho = " + std::to_string(rho));
  }

  // V_b^2 f'^2 = 1/V*^2 - 1/V_b^2 = 2 (M - m) rho^(2-n) / (V*^2 V_b^2).
  const double m = base.m;
  auto radicand = [g, base, vstar2, m, n](double rho) {
    const double excess = g.mass_function_value(rho) - m;
    return std::max(0.0, 2.0 * excess * std::pow(rho, 2 - n) / (vstar2(rho) * horizon_polynomial(base, rho)));
  };
  g.f_prime = [g, base, radicand](double rho) {
    check_range(g, rho);
    return std::sqrt(radicand(rho) / horizon_polynomial(base, rho));
  };
  g.f_second = [g, base, radicand, vstar2, dvstar2, m, n](double rho) {
    check_range(g, rho);
    const double s = radicand(rho);
    if (s == 0.0) return 0.0;
    const double vb2 = horizon_polynomial(base, rho);
    const double excess = g.mass_function_value(rho) - m;
    const double log_s = g.mass_function_slope(rho) / excess + (2.0 - n) / rho - dvstar2(rho) / vstar2(rho) -
                         d_potential_sq(n, m, rho) / vb2;
    const double fp = std::sqrt(s / vb2);
    return fp * 0.5 * (log_s - d_potential_sq(n, m, rho) / vb2);
  };
  return g;
}

RadialGraph RadialGraph::custom(const SpaceParams& base, std::function<double(double)> f_prime,
                                std::function<double(double)> f_second, double rho_inner, double tau,
                                bool horizon_type) {
  base.validate();
  RadialGraph g;
  g.kind = Kind::custom;
  g.base = base;
  g.base_rho0 = find_horizon(base).rho0;
  g.rho_inner = std::max(rho_inner, g.base_rho0);
  g.tau = tau;
  g.horizon_type = horizon_type;
  g.f_prime = std::move(f_prime);
  g.f_second = std::move(f_second);
  return g;
}

double mass_integrand(const RadialGraph& graph, double rho) {
  check_range(graph, rho);
  const double fp = graph.f_prime(rho);
  const double v2 = horizon_polynomial(graph.base, rho);
  return graph.base.m + 0.5 * std::pow(rho, graph.base.n - 2) * v2 * v2 * v2 * fp * fp;
}

MassEstimate mass_limit(const RadialGraph& graph, const std::vector<double>& schedule) {
  const int n = graph.base.n;
  if (schedule.size() < 3) throw DomainError("mass extrapolation needs at least three radii");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1])) throw DomainError("radius schedule must be increasing");
  if (!(graph.tau > 0.5 * n))
    throw DecayViolationError("declared decay order " + std::to_string(graph.tau) + " does not exceed n/2");

  MassEstimate est;
  for (double rho : schedule) est.samples.emplace_back(rho, mass_integrand(graph, rho));

  const std::size_t k = schedule.size() - 3;
  const double r0 = schedule[k], r1 = schedule[k + 1], r2 = schedule[k + 2];
  const double i0 = est.samples[k].second, i1 = est.samples[k + 1].second, i2 = est.samples[k + 2].second;

  // Decay of the perturbation |e| = V^4 f'^2.
  auto size_of = [&graph](double rho) {
    const double fp = graph.f_prime(rho);
    const double v2 = horizon_polynomial(graph.base, rho);
    return v2 * v2 * fp * fp;
  };
  const double e0 = size_of(r0), e2 = size_of(r2);
  if (e0 > 0.0 && e2 > 0.0) {
    est.fitted_tau = -std::log(e2 / e0) / std::log(r2 / r0);
    if (!(est.fitted_tau > 0.5 * n))
      throw DecayViolationError("fitted decay order " + std::to_string(est.fitted_tau) + " does not exceed n/2");
  } else {
    est.fitted_tau = std::numeric_limits<double>::infinity();
  }

  const double d1 = i1 - i0, d2 = i2 - i1;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(i0), std::abs(i1), std::abs(i2), 1.0});
  if (std::abs(d1) <= noise && std::abs(d2) <= noise) {
    est.exact = true;
    est.mass = i2;
    est.error_estimate = noise;
    est.fitted_exponent = std::numeric_limits<double>::infinity();
    return est;
  }
  const double ratio = d2 / d1;
  if (!(ratio > 0.0 && ratio < 1.0) || !std::isfinite(ratio))
    throw DecayViolationError("boundary integrals do not converge monotonically (difference ratio " +
                              std::to_string(ratio) + ")");

  // Solve (r1^-p - r2^-p) / (r0^-p - r1^-p) = ratio for p by bisection.
  auto model_ratio = [r0, r1, r2](double p) {
    const double a = std::pow(r0, -p), b = std::pow(r1, -p), c = std::pow(r2, -p);
    return (b - c) / (a - b);
  };
  double lo = 1e-3, hi = 60.0;
  if (!(model_ratio(lo) > ratio && model_ratio(hi) < ratio))
    throw DecayViolationError("could not fit a power-law decay to the boundary integrals");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (model_ratio(mid) > ratio ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  const double b = std::pow(r1, -p), c = std::pow(r2, -p);
  const double amplitude = d2 / (c - b);
  est.fitted_exponent = p;
  est.mass = i2 - amplitude * c;
  // Next-order term assumed one decay factor smaller than the correction.
  est.error_estimate = std::abs(amplitude * c) * std::pow(r2 / r0, -p) + noise;
  return est;
}

ShapeOperator radial_shape_operator(const RadialGraph& graph, double rho) {
  check_range(graph, rho);
  const SpaceParams& p = graph.base;
  const int n = p.n;
  const double V = std::sqrt(horizon_polynomial(p, rho));
  const double dV = rho + (n - 2) * p.m * std::pow(rho, 1 - n);  // dV/dr
  const double fp = graph.f_prime(rho);
  const double fpp = graph.f_second(rho);
  const double dV_drho = dV / V;
  const double f_r = V * fp;
  const double f_rr = V * (dV_drho * fp + V * fpp);
  const double W = std::sqrt(1.0 + V * V * f_r * f_r);
  ShapeOperator s;
  s.kappa_rad = V / (W * W * W) * (f_rr + 2.0 * dV * f_r / V + V * dV * f_r * f_r * f_r);
  s.kappa_tan = V * V * f_r / (rho * W);
  s.S2 = (n - 1) * s.kappa_rad * s.kappa_tan + 0.5 * (n - 1) * (n - 2) * s.kappa_tan * s.kappa_tan;
  return s;
}

MassIdentity mass_identity_check(const RadialGraph& graph, const std::vector<double>& schedule) {
  if (!graph.horizon_type)
    throw DomainError("mass identity needs a graph whose inner boundary is a horizon");
  const int n = graph.base.n;
  MassIdentity out;
  out.base_mass = graph.base.m;
  out.lhs_mass = mass_limit(graph, schedule).mass;

  const double rin = graph.rho_inner;
  const double vb2 = horizon_polynomial(graph.base, rin);
  out.boundary = 0.5 * vb2 * std::pow(rin, n - 2);

  // int_{rin}^inf S2 rho^(n-1) d rho / (n-1); rho = rin + xi^2 near the
  // inner boundary, doubling panels further out.
  using GL = boost::math::quadrature::gauss<double, 20>;
  double min_s2 = std::numeric_limits<double>::infinity();
  auto density = [&](double rho) {
    const double s2 = radial_shape_operator(graph, rho).S2;
    min_s2 = std::min(min_s2, s2);
    return s2 * std::pow(rho, n - 1);
  };
  double bulk = 0.0;
  const double first = std::sqrt(rin);  // covers [rin, 2 rin]
  const int inner_panels = 8;
  for (int k = 0; k < inner_panels; ++k) {
    const double a = first * k / inner_panels, b = first * (k + 1) / inner_panels;
    bulk += GL::integrate([&](double xi) { return 2.0 * xi * density(rin + xi * xi); }, a, b);
  }
  double lo = 2.0 * rin;
  for (int k = 0; k < 48; ++k) {
    const double hi = 2.0 * lo;
    bulk += GL::integrate(density, lo, hi);
    lo = hi;
  }
  out.bulk = bulk / (n - 1);
  out.min_S2 = min_s2;
  out.rhs_mass = graph.base.m + out.bulk + out.boundary;
  out.residual = std::abs(out.lhs_mass - out.rhs_mass);
  return out;
}

double penrose_deficit(double mass, double sigma_area, const SpaceParams& params) {
  if (!(sigma_area > 0.0)) throw DomainError("surface area must be positive");
  const int n = params.n;
  const double a = sigma_area / params.theta;
  return mass - 0.5 * (std::pow(a, n / (n - 1.0)) + params.kappa * std::pow(a, (n - 2.0) / (n - 1.0)));
}

double inner_boundary_area(const RadialGraph& graph) {
  return std::pow(graph.rho_inner, graph.base.n - 1) * graph.base.theta;
}

}  // namespace kflow

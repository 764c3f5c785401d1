#include "kflow/kottler.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kflow/error.hpp"

namespace kflow {

namespace {

// d/drho of the horizon polynomial.
double horizon_polynomial_slope(const SpaceParams& p, double rho) {
  return 2.0 * rho + 2.0 * (p.n - 2) * p.m * std::pow(rho, 1 - p.n);
}

constexpr double kMassSlack = 1e-13;

}  // namespace

SpaceParams SpaceParams::make(int n, int kappa, double m, double theta) {
  SpaceParams p{n, kappa, m, theta, false};
  p.validate();
  return p;
}

SpaceParams SpaceParams::hyperbolic_limit(int n, double theta) {
  SpaceParams p{n, 1, 0.0, theta, true};
  p.validate();
  return p;
}

void SpaceParams::validate() const {
  if (n < 3) throw InvalidDimensionError("dimension n must be >= 3, got " + std::to_string(n));
  if (kappa < -1 || kappa > 1)
    throw DomainError("kappa must be -1, 0 or +1, got " + std::to_string(kappa));
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw DomainError("fibre area theta must be positive and finite");
  if (!std::isfinite(m)) throw DomainError("mass must be finite");
  if (degenerate_horizon) {
    if (kappa != 1 || m != 0.0)
      throw DomainError("the degenerate-horizon limit is only defined for kappa = 1, m = 0");
    return;
  }
  if (kappa >= 0 && !(m > 0.0))
    throw NoHorizonError("kappa = " + std::to_string(kappa) + " requires m > 0, got m = " +
                         std::to_string(m));
  if (kappa == -1 && m < critical_mass(n) - kMassSlack)
    throw NoHorizonError("m = " + std::to_string(m) + " is below the critical mass " +
                         std::to_string(critical_mass(n)));
}

double critical_mass(int n) {
  if (n < 3) throw InvalidDimensionError("critical_mass requires n >= 3");
  return -std::pow(n - 2.0, (n - 2.0) / 2.0) / std::pow(static_cast<double>(n), n / 2.0);
}

double horizon_polynomial(const SpaceParams& p, double rho) {
  double value = rho * rho + p.kappa;
  if (p.m != 0.0) value -= 2.0 * p.m * std::pow(rho, 2 - p.n);
  return value;
}

HorizonData find_horizon(const SpaceParams& p) {
  p.validate();
  auto finish = [&p](double rho0) {
    HorizonData h;
    h.rho0 = rho0;
    h.horizon_area = std::pow(rho0, p.n - 1) * p.theta;
    h.horizon_mass_check = mass_from_horizon_area(h.horizon_area, p.n, p.kappa, p.theta);
    return h;
  };
  if (p.degenerate_horizon) {
    HorizonData h;
    h.horizon_mass_check = 0.0;
    return h;
  }
  if (p.kappa == -1 && p.m == 0.0) return finish(1.0);

  auto phi = [&p](double rho) { return horizon_polynomial(p, rho); };

  double lo = 0.0;
  if (p.m < 0.0) {
    // kappa = -1: phi has its minimum at rho_h; the largest root lies above it.
    lo = std::pow(-(p.n - 2) * p.m, 1.0 / p.n);
    const double at_min = phi(lo);
    if (at_min >= 0.0) {
      if (p.m >= critical_mass(p.n) - kMassSlack) return finish(lo);  // double root
      throw NoHorizonError("horizon polynomial has no positive root");
    }
  } else {
    lo = 1.0;
    while (phi(lo) >= 0.0) {
      lo *= 0.5;
      if (lo < 1e-300) throw NumericError("could not bracket horizon from below", lo, 1.0);
    }
  }
  double hi = std::pow(2.0 * std::abs(p.m) + std::abs(p.kappa) + 1.0, 1.0 / (p.n - 2)) + 1.0;
  hi = std::max(hi, lo * 2.0);
  while (phi(hi) <= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("could not bracket horizon from above", lo, hi);
  }

  // Bisection to a coarse bracket, then Newton inside the bracket.
  for (int it = 0; it < 200 && (hi - lo) > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  double rho = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = phi(rho);
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = rho;
    const double slope = horizon_polynomial_slope(p, rho);
    double next = rho - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - rho);
    rho = next;
    if (step <= 1e-16 * rho) break;
  }
  if (std::abs(phi(rho)) > 1e-12 * std::max(1.0, rho * rho))
    throw NumericError("horizon root did not converge", lo, hi);
  return finish(rho);
}

double potential_unchecked(const SpaceParams& p, double rho) {
  return std::sqrt(std::max(0.0, horizon_polynomial(p, rho)));
}

double potential(const SpaceParams& p, double rho) {
  const double rho0 = find_horizon(p).rho0;
  if (rho < rho0 * (1.0 - 1e-14))
    throw DomainError("potential evaluated inside the horizon (rho = " + std::to_string(rho) +
                      " < rho0 = " + std::to_string(rho0) + ")");
  return potential_unchecked(p, rho);
}

double mass_from_horizon_area(double area, int n, int kappa, double theta) {
  if (n < 3) throw InvalidDimensionError("mass_from_horizon_area requires n >= 3");
  if (!(area > 0.0) || !(theta > 0.0)) throw DomainError("horizon area and theta must be positive");
  const double ratio = area / theta;
  return 0.5 * (std::pow(ratio, n / (n - 1.0)) + kappa * std::pow(ratio, (n - 2.0) / (n - 1.0)));
}

RadialProfilePair kottler_graph_profile(const SpaceParams& base, double m_graph) {
  base.validate();
  if (m_graph < base.m)
    throw NonRepresentableGraphError("graph mass " + std::to_string(m_graph) +
                                     " is below the base mass " + std::to_string(base.m));
  SpaceParams graph = base;
  graph.m = m_graph;
  graph.degenerate_horizon = base.degenerate_horizon && m_graph == 0.0;
  graph.validate();

  RadialProfilePair pair;
  pair.m_base = base.m;
  pair.m_graph = m_graph;
  pair.rho_start = find_horizon(graph).rho0;
  const double delta_m = m_graph - base.m;
  const double rho_start = pair.rho_start;

  // V_b^2 f'^2 = 1/V_g^2 - 1/V_b^2 = 2 dm rho^(2-n) / (V_g^2 V_b^2), written
  // without the subtraction.
  auto radicand = [base, graph, delta_m](double rho) {
    const double vb2 = horizon_polynomial(base, rho);
    const double vg2 = horizon_polynomial(graph, rho);
    return 2.0 * delta_m * std::pow(rho, 2 - base.n) / (vg2 * vb2);
  };
  auto check = [rho_start](double rho) {
    if (!(rho > rho_start))
      throw DomainError("profile evaluated at rho = " + std::to_string(rho) +
                        " at or inside the graph horizon " + std::to_string(rho_start));
  };

  pair.f_prime = [=](double rho) {
    check(rho);
    if (delta_m == 0.0) return 0.0;
    return std::sqrt(radicand(rho)) / potential_unchecked(base, rho);
  };
  pair.f_second = [=](double rho) {
    check(rho);
    if (delta_m == 0.0) return 0.0;
    const double vb2 = horizon_polynomial(base, rho);
    const double vg2 = horizon_polynomial(graph, rho);
    const double fp = std::sqrt(radicand(rho) / vb2);
    const double log_slope = 0.5 * ((2.0 - base.n) / rho -
                                    horizon_polynomial_slope(graph, rho) / vg2 -
                                    2.0 * horizon_polynomial_slope(base, rho) / vb2);
    return fp * log_slope;
  };
  return pair;
}

}  // namespace kflow

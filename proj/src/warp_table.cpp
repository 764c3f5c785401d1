#include "kflow/warp_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "kflow/error.hpp"

namespace kflow {

namespace {

// phi(rho0 + x) where phi(rho0) = 0, evaluated without cancellation near
// the horizon.
double phi_offset(const SpaceParams& p, double rho0, double x) {
  if (rho0 == 0.0) return horizon_polynomial(p, x);
  double value = x * (2.0 * rho0 + x);
  if (p.m != 0.0) {
    const double rel = std::expm1((2 - p.n) * std::log1p(x / rho0));
    value -= 2.0 * p.m * std::pow(rho0, 2 - p.n) * rel;
  }
  return value;
}

}  // namespace

WarpSample warp_derivatives(const SpaceParams& p, double rho0, double rho) {
  WarpSample s;
  s.lambda = rho;
  s.d_lambda = std::sqrt(std::max(0.0, phi_offset(p, rho0, rho - rho0)));
  s.dd_lambda = rho;
  if (p.m != 0.0) s.dd_lambda += (p.n - 2) * p.m * std::pow(rho, 1 - p.n);
  return s;
}

double WarpTable::xi_integral(double a, double b) const {
  // dr = 2 xi dxi / V(rho0 + xi^2); the integrand is smooth at xi = 0.
  auto integrand = [this](double xi) {
    if (xi == 0.0) {
      if (rho0_ == 0.0) return 0.0;
      const double slope = 2.0 * rho0_ + 2.0 * (params_.n - 2) * params_.m * std::pow(rho0_, 1 - params_.n);
      return 2.0 / std::sqrt(slope);
    }
    const double x = xi * xi;
    return 2.0 * xi / std::sqrt(phi_offset(params_, rho0_, x));
  };
  return boost::math::quadrature::gauss<double, 15>::integrate(integrand, a, b);
}

WarpTable WarpTable::build(const SpaceParams& params, double r_max, double tol, std::size_t nodes) {
  params.validate();
  if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (nodes < 16) throw ResolutionError("warp table needs at least 16 nodes");

  WarpTable t;
  t.params_ = params;
  t.rho0_ = find_horizon(params).rho0;
  if (!params.degenerate_horizon && params.kappa == -1 && params.m < 0.0) {
    const double slope = 2.0 * t.rho0_ + 2.0 * (params.n - 2) * params.m * std::pow(t.rho0_, 1 - params.n);
    if (!(slope > 1e-12 * t.rho0_))
      throw DomainError("critical mass: the horizon is a double root and r(rho) diverges");
  }

  const std::size_t count = nodes;
  t.h_ = r_max / static_cast<double>(count - 1);
  t.r_.resize(count);
  t.xi_.resize(count);
  t.lambda_.resize(count);
  t.d_lambda_.resize(count);
  t.dd_lambda_.resize(count);

  auto store = [&t](std::size_t k, double xi) {
    t.xi_[k] = xi;
    const WarpSample s = warp_derivatives(t.params_, t.rho0_, t.rho0_ + xi * xi);
    t.lambda_[k] = s.lambda;
    t.d_lambda_[k] = s.d_lambda;
    t.dd_lambda_[k] = s.dd_lambda;
  };
  t.r_[0] = 0.0;
  store(0, 0.0);

  for (std::size_t k = 1; k < count; ++k) {
    t.r_[k] = (k + 1 == count) ? r_max : static_cast<double>(k) * t.h_;
    const double step = t.r_[k] - t.r_[k - 1];
    const double lam = t.lambda_[k - 1];
    const double guess_rho = lam + step * t.d_lambda_[k - 1] + 0.5 * step * step * t.dd_lambda_[k - 1];
    const double xi_prev = t.xi_[k - 1];
    double xi = std::sqrt(std::max(guess_rho - t.rho0_, 0.0));
    if (!(xi > xi_prev)) xi = xi_prev + step;

    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const double residual = t.xi_integral(xi_prev, xi) - step;
      const double x = xi * xi;
      const double slope = 2.0 * xi / std::sqrt(phi_offset(params, t.rho0_, x));
      double next = xi - residual / slope;
      if (!(next > xi_prev)) next = 0.5 * (xi + xi_prev);
      const double change = std::abs(next - xi);
      xi = next;
      if (change <= 4e-16 * xi) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(xi))
      throw NumericError("warp table inversion failed at r = " + std::to_string(t.r_[k]),
                         t.r_[k - 1], t.r_[k]);
    store(k, xi);
  }

  // A-posteriori check at every segment midpoint.
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double r_mid = 0.5 * (t.r_[k] + t.r_[k + 1]);
    const double lam = t.lambda(r_mid);
    const double r_back = t.radius_of(lam);
    const WarpSample s = warp_derivatives(params, t.rho0_, lam);
    const double err = std::abs(r_back - r_mid) * s.d_lambda / std::max(lam, 1.0);
    worst = std::max(worst, err);
  }
  if (worst > tol)
    throw ResolutionError("warp table interpolation error " + std::to_string(worst) +
                          " exceeds tolerance with " + std::to_string(count) + " nodes");
  return t;
}

double WarpTable::lambda(double r) const {
  if (!(r >= 0.0) || r > r_.back() * (1.0 + 1e-15))
    throw DomainError("r = " + std::to_string(r) + " outside the warp table [0, " +
                      std::to_string(r_.back()) + "]");
  std::size_t k = std::min(static_cast<std::size_t>(r / h_), r_.size() - 2);
  const double h = r_[k + 1] - r_[k];
  const double s = std::clamp((r - r_[k]) / h, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h3 = 0.5 * s3 - s4 + 0.5 * s5;
  const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  const double value = lambda_[k] * h0 + h * d_lambda_[k] * h1 + h * h * dd_lambda_[k] * h2 +
                       h * h * dd_lambda_[k + 1] * h3 + h * d_lambda_[k + 1] * h4 +
                       lambda_[k + 1] * h5;
  return std::max(value, rho0_);
}

WarpSample WarpTable::eval(double r) const {
  return warp_derivatives(params_, rho0_, lambda(r));
}

double WarpTable::radius_of(double rho) const {
  if (rho < rho0_ * (1.0 - 1e-14))
    throw DomainError("rho = " + std::to_string(rho) + " lies inside the horizon");
  if (rho > lambda_.back() * (1.0 + 1e-14))
    throw DomainError("rho = " + std::to_string(rho) + " beyond the warp table range");
  rho = std::clamp(rho, rho0_, lambda_.back());
  auto it = std::upper_bound(lambda_.begin(), lambda_.end(), rho);
  std::size_t k = (it == lambda_.begin()) ? 0 : static_cast<std::size_t>(it - lambda_.begin()) - 1;
  k = std::min(k, lambda_.size() - 2);
  const double xi = std::sqrt(rho - rho0_);
  return r_[k] + xi_integral(xi_[k], xi);
}

double WarpTable::identity_residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < lambda_.size(); ++k) {
    const double lam = lambda_[k];
    const double rhs = horizon_polynomial(params_, lam);
    const double err = std::abs(d_lambda_[k] * d_lambda_[k] - rhs) / std::max(1.0, lam * lam);
    worst = std::max(worst, err);
  }
  return worst;
}

void WarpTable::write_csv(std::ostream& out) const {
  out << "r,lambda\n";
  char buf[64];
  for (std::size_t k = 0; k < r_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r_[k], lambda_[k]);
    out << buf;
  }
}

CurvatureDeviation curvature_deviation(const SpaceParams& params, const WarpTable& warp, double r) {
  CurvatureDeviation d;
  if (params.m == 0.0) return d;
  const double lam = warp.lambda(r);
  const double decay = params.m * std::pow(lam, -params.n);
  // (kappa - lambda'^2)/lambda^2 + 1 and -lambda''/lambda + 1, simplified
  // with the warp identities so no cancellation occurs at large r.
  d.tangential = 2.0 * decay;
  d.radial = -(params.n - 2) * decay;
  d.riem_dev = std::max(std::abs(d.tangential), std::abs(d.radial));
  d.ric_dev = (params.n - 1.0) * (params.n - 2.0) * std::abs(decay);
  return d;
}

}  // namespace kflow

#include "kflow/base_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "kflow/error.hpp"
#include "kflow/simd/stencil_kernels.hpp"

namespace kflow {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^pi cos(k t) sin^(d-1)(t) dt by composite Gauss-Legendre.
double cosine_moment(int k, int d, int panels) {
  auto f = [k, d](double t) { return std::cos(k * t) * std::pow(std::sin(t), d - 1); };
  double sum = 0.0;
  const double width = kPi / panels;
  for (int p = 0; p < panels; ++p)
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, p * width, (p + 1) * width);
  return sum;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (i < 0) return static_cast<std::size_t>(-i - 1);
  if (i >= nn) return static_cast<std::size_t>(2 * nn - 1 - i);
  return static_cast<std::size_t>(i);
}

}  // namespace

const char* grid_mode_name(GridMode mode) {
  switch (mode) {
    case GridMode::torus2d: return "torus2d";
    case GridMode::sphere_axisym: return "sphere_axisym";
    case GridMode::symmetric: return "symmetric";
  }
  return "?";
}

GridMode parse_grid_mode(const std::string& name) {
  if (name == "torus2d") return GridMode::torus2d;
  if (name == "sphere_axisym") return GridMode::sphere_axisym;
  if (name == "symmetric") return GridMode::symmetric;
  throw ConfigError("unknown grid mode '" + name + "'", {"grid.mode"});
}

double sphere_area(int d) {
  return 2.0 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
}

std::shared_ptr<const BaseGrid> make_grid(const GridSpec& spec) {
  auto grid = std::make_shared<BaseGrid>();
  grid->mode = spec.mode;
  grid->kappa = spec.kappa;
  grid->dim = spec.dim;
  switch (spec.mode) {
    case GridMode::torus2d: {
      if (spec.kappa != 0) throw ConfigError("torus2d grids require kappa = 0", {"space.kappa", "grid.mode"});
      if (spec.dim != 2) throw ConfigError("torus2d grids are two-dimensional (n = 3)", {"grid.dim"});
      if (spec.resolution < 8) throw ConfigError("torus2d resolution must be >= 8", {"grid.resolution"});
      if (!(spec.length > 0.0)) throw ConfigError("torus side length must be positive", {"grid.length"});
      const auto n = static_cast<std::size_t>(spec.resolution);
      grid->nx = grid->ny = n;
      grid->spacing = spec.length / static_cast<double>(n);
      grid->theta = spec.length * spec.length;
      const double w = grid->spacing * grid->spacing;
      grid->weights.assign(n * n, w);
      grid->x.resize(n * n);
      grid->y.resize(n * n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          grid->x[j * n + i] = static_cast<double>(i) * grid->spacing;
          grid->y[j * n + i] = static_cast<double>(j) * grid->spacing;
        }
      break;
    }
    case GridMode::sphere_axisym: {
      if (spec.kappa != 1)
        throw ConfigError("sphere_axisym grids require kappa = 1", {"space.kappa", "grid.mode"});
      if (spec.dim < 2) throw ConfigError("sphere dimension must be >= 2", {"grid.dim"});
      if (spec.resolution < 8) throw ConfigError("sphere_axisym resolution must be >= 8", {"grid.resolution"});
      const int n = spec.resolution;
      const int d = spec.dim;
      grid->nx = static_cast<std::size_t>(n);
      grid->ny = 1;
      grid->spacing = kPi / n;
      grid->theta = sphere_area(d);
      std::vector<double> moments(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) moments[static_cast<std::size_t>(k)] = cosine_moment(k, d, n);
      const double orbit = sphere_area(d - 1);
      grid->weights.resize(grid->nx);
      grid->x.resize(grid->nx);
      grid->cot.resize(grid->nx);
      for (int j = 0; j < n; ++j) {
        const double t = (j + 0.5) * grid->spacing;
        double w = moments[0] / n;
        for (int k = 1; k < n; ++k) w += 2.0 / n * std::cos(k * t) * moments[static_cast<std::size_t>(k)];
        const auto jj = static_cast<std::size_t>(j);
        grid->weights[jj] = orbit * w;
        grid->x[jj] = t;
        grid->cot[jj] = std::cos(t) / std::sin(t);
      }
      break;
    }
    case GridMode::symmetric: {
      if (spec.kappa < -1 || spec.kappa > 1) throw ConfigError("kappa must be -1, 0 or 1", {"space.kappa"});
      if (!(spec.theta > 0.0) || !std::isfinite(spec.theta))
        throw ConfigError("theta must be positive", {"space.theta"});
      grid->theta = spec.theta;
      grid->weights.assign(1, spec.theta);
      grid->x.assign(1, 0.0);
      break;
    }
  }
  return grid;
}

ScalarField::ScalarField(std::shared_ptr<const BaseGrid> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw DomainError("scalar field without a grid");
  if (values.size() != grid->size())
    throw DomainError("scalar field has " + std::to_string(values.size()) + " values for " +
                      std::to_string(grid->size()) + " nodes");
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("scalar field contains a non-finite value");
}

ScalarField ScalarField::constant(std::shared_ptr<const BaseGrid> g, double c) {
  const std::size_t n = g->size();
  return ScalarField(std::move(g), std::vector<double>(n, c));
}

FieldDerivatives differentiate(const ScalarField& field) {
  const BaseGrid& g = *field.grid;
  const std::size_t n = g.size();
  FieldDerivatives d;
  d.d1.assign(n, 0.0);
  d.d2.assign(n, 0.0);
  d.h11.assign(n, 0.0);
  d.h12.assign(n, 0.0);
  d.h22.assign(n, 0.0);
  d.tan.assign(n, 0.0);
  d.laplacian.assign(n, 0.0);
  const double* f = field.values.data();

  if (g.mode == GridMode::torus2d) {
    simd::periodic_derivatives_2d(f, g.nx, g.ny, g.spacing,
                                  {d.d1.data(), d.d2.data(), d.h11.data(), d.h22.data(), d.h12.data()});
    for (std::size_t i = 0; i < n; ++i) d.laplacian[i] = d.h11[i] + d.h22[i];
  } else if (g.mode == GridMode::sphere_axisym) {
    d.tan_multiplicity = g.dim - 1;
    const double inv12h = 1.0 / (12.0 * g.spacing);
    const double inv12h2 = 1.0 / (12.0 * g.spacing * g.spacing);
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      const double fp1 = f[reflect(jj + 1, n)], fm1 = f[reflect(jj - 1, n)];
      const double fp2 = f[reflect(jj + 2, n)], fm2 = f[reflect(jj - 2, n)];
      const double ft = ((fp1 - fm1) * 8.0 + (fm2 - fp2)) * inv12h;
      const double ftt = (((fp1 + fm1) * 16.0 - (fp2 + fm2)) - f[j] * 30.0) * inv12h2;
      d.d1[j] = ft;
      d.h11[j] = ftt;
      d.tan[j] = g.cot[j] * ft;
      d.laplacian[j] = ftt + d.tan_multiplicity * d.tan[j];
    }
  }
  return d;
}

double integrate(const BaseGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw DomainError("integrand size does not match the grid");
  return simd::weighted_sum(values.data(), grid.weights.data(), values.size());
}

double integrate(const ScalarField& field) { return integrate(*field.grid, field.values); }

BecknerResult beckner_deficit(const ScalarField& field, int n, std::optional<int> kappa) {
  if (n < 3) throw InvalidDimensionError("Beckner deficit requires n >= 3");
  const BaseGrid& g = *field.grid;
  if (g.mode == GridMode::sphere_axisym && g.dim != n - 1)
    throw DomainError("sphere dimension " + std::to_string(g.dim) + " does not match n - 1 = " +
                      std::to_string(n - 1));
  if (g.mode == GridMode::torus2d && n != 3) throw DomainError("torus grids carry n = 3 only");
  for (double v : field.values)
    if (!(v > 0.0)) throw DomainError("Beckner deficit requires a positive field");
  const int k = kappa.value_or(g.kappa);

  const FieldDerivatives d = differentiate(field);
  const std::size_t count = g.size();
  std::vector<double> pow_a(count), pow_grad(count), pow_b(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = field.values[i];
    const double grad2 = d.d1[i] * d.d1[i] + d.d2[i] * d.d2[i];
    pow_a[i] = std::pow(f, n - 2);
    pow_grad[i] = std::pow(f, n - 4) * grad2;
    pow_b[i] = std::pow(f, n - 1);
  }
  const double int_a = integrate(g, pow_a);
  const double int_grad = integrate(g, pow_grad);
  const double int_b = integrate(g, pow_b);
  const double potential_term = (n - 1.0) * k * int_a;
  const double rhs = (n - 1.0) * k * std::pow(g.theta, 1.0 / (n - 1)) * std::pow(int_b, (n - 2.0) / (n - 1));

  BecknerResult r;
  r.sharp = potential_term + 0.5 * (n - 2) * int_grad - rhs;
  r.nonsharp = potential_term + 0.5 * (n - 1) * int_grad - rhs;
  r.scale = std::max({std::abs(potential_term), 0.5 * (n - 1) * int_grad, std::abs(rhs)});
  return r;
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

ScalarField random_low_frequency_field(std::shared_ptr<const BaseGrid> grid, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto coeff = [&engine] { return 2.0 * unit_uniform(engine()) - 1.0; };
  const BaseGrid& g = *grid;
  std::vector<double> p(g.size(), 0.0);
  // The peak is taken on a fixed lattice, not on the grid, so that a seed
  // names the same function at every resolution.
  constexpr int kLattice = 512;
  double peak = 0.0;
  if (g.mode == GridMode::torus2d) {
    struct Mode {
      int kx, ky;
      double a, b;
    };
    std::vector<Mode> modes;
    for (int ky = 0; ky <= 2; ++ky)
      for (int kx = -2; kx <= 2; ++kx) {
        if (ky == 0 && kx <= 0) continue;  // one of each +-k pair
        const double a = coeff(), b = coeff();
        modes.push_back({kx, ky, a, b});
      }
    auto eval = [&modes](double sx, double sy) {  // sx, sy in units of the period
      double v = 0.0;
      for (const auto& m : modes) {
        const double phase = 2.0 * kPi * (m.kx * sx + m.ky * sy);
        v += m.a * std::cos(phase) + m.b * std::sin(phase);
      }
      return v;
    };
    const double period = g.spacing * static_cast<double>(g.nx);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = eval(g.x[i] / period, g.y[i] / period);
    for (int j = 0; j < kLattice; ++j)
      for (int i = 0; i < kLattice; ++i)
        peak = std::max(peak, std::abs(eval(static_cast<double>(i) / kLattice, static_cast<double>(j) / kLattice)));
  } else if (g.mode == GridMode::sphere_axisym) {
    const double a[3] = {coeff(), coeff(), coeff()};
    auto eval = [&a](double t) { return a[0] * std::cos(t) + a[1] * std::cos(2 * t) + a[2] * std::cos(3 * t); };
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = eval(g.x[i]);
    for (int i = 0; i <= kLattice; ++i) peak = std::max(peak, std::abs(eval(kPi * i / kLattice)));
  }
  if (peak > 0.0)
    for (double& v : p) v /= peak;
  return ScalarField(std::move(grid), std::move(p));
}

}  // namespace kflow

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kflow {

enum class GridMode { torus2d, sphere_axisym, symmetric };

const char* grid_mode_name(GridMode mode);
GridMode parse_grid_mode(const std::string& name);

struct GridSpec {
  GridMode mode = GridMode::torus2d;
  int resolution = 64;
  double length = 6.283185307179586;  // torus side L
  int dim = 2;                        // dimension of N (sphere and symmetric modes)
  double theta = 1.0;                 // symmetric mode only
  int kappa = 0;
};

/// Discretisation of the closed base manifold (N, g_hat).
///
/// torus2d: nx = ny = resolution periodic nodes, index j*nx + i, kappa = 0.
/// sphere_axisym: fields depend on the polar angle only; nodes at
///   (j + 1/2) pi / N and generalised Fejer weights for sin^(dim-1).
/// symmetric: one node carrying the whole area theta.
struct BaseGrid {
  GridMode mode = GridMode::symmetric;
  int kappa = 0;
  int dim = 2;
  std::size_t nx = 1;
  std::size_t ny = 1;
  double spacing = 0.0;
  double theta = 1.0;
  std::vector<double> weights;
  std::vector<double> x;    // torus: x coordinate; sphere: polar angle
  std::vector<double> y;    // torus only
  std::vector<double> cot;  // sphere only: cot of the polar angle

  std::size_t size() const { return weights.size(); }
  bool has_derivatives() const { return mode != GridMode::symmetric; }
};

/// Throws ConfigError for unsupported (mode, kappa) pairings or resolutions.
std::shared_ptr<const BaseGrid> make_grid(const GridSpec& spec);

/// Area of the unit round sphere S^d.
double sphere_area(int d);

struct ScalarField {
  std::shared_ptr<const BaseGrid> grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const BaseGrid> g, std::vector<double> v);
  static ScalarField constant(std::shared_ptr<const BaseGrid> g, double c);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Derivatives in a g_hat-orthonormal frame.
///
/// Directions 1, 2 carry the gradient (torus: x, y; sphere: e_theta). On the
/// sphere the remaining dim-1 directions are tangent to the orbits of the
/// symmetry; there the gradient vanishes and the Hessian is `tan` times the
/// identity (multiplicity `tan_multiplicity`).
struct FieldDerivatives {
  std::vector<double> d1, d2;
  std::vector<double> h11, h12, h22;
  std::vector<double> tan;
  int tan_multiplicity = 0;
  std::vector<double> laplacian;
};

FieldDerivatives differentiate(const ScalarField& field);

double integrate(const ScalarField& field);
double integrate(const BaseGrid& grid, const std::vector<double>& values);

struct BecknerResult {
  double sharp = 0.0;     // gradient coefficient (n-2)/2
  double nonsharp = 0.0;  // gradient coefficient (n-1)/2
  double scale = 0.0;     // largest term in absolute value
};

/// Beckner-type deficit of a positive field. `kappa` defaults to the grid's.
BecknerResult beckner_deficit(const ScalarField& field, int n, std::optional<int> kappa = std::nullopt);

/// Seed-deterministic low-frequency field P (zero in symmetric mode).
/// torus: Fourier modes with |k|_inf <= 2; sphere: cos(k theta), k = 1..3.
/// Scaled by its peak on a fixed 512-point lattice per direction, so the
/// seed fixes one function at every resolution; |P| <= 1 + 1e-4 everywhere.
ScalarField random_low_frequency_field(std::shared_ptr<const BaseGrid> grid, std::uint64_t seed);

/// Uniform double in [0, 1) from a 64-bit engine, independent of the
/// standard library's distribution implementation.
double unit_uniform(std::uint64_t bits);

}  // namespace kflow

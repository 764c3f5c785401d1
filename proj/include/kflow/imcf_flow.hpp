#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kflow/error.hpp"
#include "kflow/hypersurface.hpp"

namespace kflow {

struct FlowConfig {
  double t_end = 1.0;
  double cfl_safety = 0.2;
  double dt_max = 0.02;
  double H_floor = 0.0;  // <= 0 selects 1e-4 (n-1)
  double record_interval = 0.05;
  std::string integrator = "rk2_adaptive";
  std::size_t max_steps = 5'000'000;

  /// Throws ConfigError naming the offending fields.
  void validate() const;
  double h_floor_for(int n) const { return H_floor > 0.0 ? H_floor : 1e-4 * (n - 1); }
};

struct FlowSample {
  double t = 0.0;
  SurfaceFunctionals f;
  double dt = 0.0;  // last accepted step before the sample
};

struct FlowTrace {
  int n = 3;
  int kappa = 0;
  double m = 0.0;
  double theta = 1.0;
  double rho0 = 0.0;
  std::vector<FlowSample> samples;
  std::vector<double> dt_history;
  std::size_t rejected_steps = 0;
  ScalarField final_u;
};

enum class StepStatus { accepted, rejected, breakdown };

struct StepResult {
  GraphSurface surface;
  SurfaceGeometry geometry;  // of `surface`; empty when rejected
  StepStatus status = StepStatus::accepted;
  std::string reason;
};

/// Largest explicit step the parabolic CFL bound allows for this geometry.
double stable_dt(const GraphSurface& surface, const SurfaceGeometry& geometry, double cfl_safety);

/// One explicit midpoint (RK2) step of du/dt = v / H.
StepResult flow_step(const GraphSurface& surface, const SurfaceGeometry& geometry, double dt,
                     double h_floor, double cfl_safety = 0.2);

/// Raised by run_flow when H falls below the floor or a step cannot be
/// completed; carries the samples recorded so far and the last surface.
class FlowBreakdown : public Error {
 public:
  FlowBreakdown(const std::string& what, FlowTrace partial, GraphSurface last)
      : Error(what), trace(std::move(partial)), surface(std::move(last)) {}

  FlowTrace trace;
  GraphSurface surface;
};

FlowTrace run_flow(const GraphSurface& initial, const FlowConfig& config);

struct MonitorResult {
  std::string name;
  bool asserted = true;
  bool passed = true;
  double value = 0.0;  // worst observed slack consumption
  double tolerance = 0.0;
  std::vector<std::size_t> flagged;  // sample intervals (k, k+1) reported by index k
  std::string detail;
};

struct MonitorTolerances {
  double q1_relative = 1e-7;
  double q1_absolute = 1e-9;
  double barrier_relative = 1e-6;
  double area_law = 1e-5;
  double p_rate_relative = 1e-2;
  double liminf = 1e-6;
  double h_limit = 1e-3;
  double gradient_slope_relative = 0.2;
};

struct MonitorReport {
  std::vector<MonitorResult> monitors;
  bool all_passed() const;
  const MonitorResult* find(const std::string& name) const;
};

MonitorReport monotonicity_report(const FlowTrace& trace, const MonitorTolerances& tol = {});

/// Least-squares slope of log sup|grad phi| over samples with t >= t_from.
/// NaN when the gradient vanishes identically there.
double gradient_decay_slope(const FlowTrace& trace, double t_from);

}  // namespace kflow

#include "kflow/imcf_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kflow {

void FlowConfig::validate() const {
  std::vector<std::string> bad;
  if (!(t_end > 0.0) || !std::isfinite(t_end)) bad.push_back("flow.t_end");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) bad.push_back("flow.cfl_safety");
  if (!(dt_max > 0.0)) bad.push_back("flow.dt_max");
  if (H_floor < 0.0 || !std::isfinite(H_floor)) bad.push_back("flow.H_floor");
  if (!(record_interval > 0.0)) bad.push_back("flow.record_interval");
  if (integrator != "rk2_adaptive") bad.push_back("flow.integrator");
  if (max_steps == 0) bad.push_back("flow.max_steps");
  if (!bad.empty()) throw ConfigError("invalid flow configuration", bad);
}

double stable_dt(const GraphSurface& surface, const SurfaceGeometry& geometry, double cfl_safety) {
  const BaseGrid& g = surface.grid();
  if (!g.has_derivatives()) return std::numeric_limits<double>::infinity();
  const double directions = g.mode == GridMode::torus2d ? 2.0 : static_cast<double>(g.dim);
  const double dx = g.spacing;
  return cfl_safety * dx * dx / (2.0 * directions * geometry.diffusion_max());
}

namespace {

std::vector<double> speed(const SurfaceGeometry& geo) {
  std::vector<double> s(geo.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = geo.v[i] / geo.H[i];
  return s;
}

bool inside_table(const std::vector<double>& u, double r_max) {
  for (double x : u)
    if (!(x > 0.0) || x > r_max) return false;
  return true;
}

}  // namespace

StepResult flow_step(const GraphSurface& surface, const SurfaceGeometry& geometry, double dt,
                     double h_floor, double cfl_safety) {
  StepResult out;
  if (dt == 0.0) {
    out.surface = surface;
    out.geometry = geometry;
    return out;
  }
  if (!(dt > 0.0)) throw DomainError("time step must be non-negative");
  if (dt > stable_dt(surface, geometry, cfl_safety) * (1.0 + 1e-12)) {
    out.status = StepStatus::rejected;
    out.reason = "step exceeds the stability bound";
    return out;
  }
  const auto grid = surface.u.grid;
  const double r_max = surface.warp->r_max();
  const std::vector<double> k1 = speed(geometry);
  std::vector<double> mid(k1.size());
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = surface.u[i] + 0.5 * dt * k1[i];
  if (!inside_table(mid, r_max)) {
    out.status = StepStatus::breakdown;
    out.reason = "surface left the tabulated range";
    return out;
  }
  const GraphSurface mid_surface(ScalarField(grid, std::move(mid)), surface.warp);
  const SurfaceGeometry mid_geo = compute_geometry_unchecked(mid_surface);
  if (!(mid_geo.f.H_min > 0.0) || dt > stable_dt(mid_surface, mid_geo, cfl_safety) * (1.0 + 1e-12)) {
    out.status = StepStatus::rejected;
    out.reason = "midpoint stage lost mean convexity or stability";
    return out;
  }
  const std::vector<double> k2 = speed(mid_geo);
  std::vector<double> next(k2.size());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = surface.u[i] + dt * k2[i];
  if (!inside_table(next, r_max)) {
    out.status = StepStatus::breakdown;
    out.reason = "surface left the tabulated range";
    return out;
  }
  out.surface = GraphSurface(ScalarField(grid, std::move(next)), surface.warp);
  out.geometry = compute_geometry_unchecked(out.surface);
  if (!(out.geometry.f.H_min > h_floor)) {
    out.status = StepStatus::breakdown;
    out.reason = "mean curvature fell to " + std::to_string(out.geometry.f.H_min) +
                 ", below the floor " + std::to_string(h_floor);
  }
  return out;
}

FlowTrace run_flow(const GraphSurface& initial, const FlowConfig& config) {
  config.validate();
  const SpaceParams& params = initial.warp->params();
  FlowTrace trace;
  trace.n = params.n;
  trace.kappa = params.kappa;
  trace.m = params.m;
  trace.theta = initial.grid().theta;
  trace.rho0 = initial.warp->rho0();
  const double h_floor = config.h_floor_for(params.n);

  GraphSurface surface = initial;
  SurfaceGeometry geo = compute_geometry(surface);
  if (!(geo.f.H_min > h_floor)) {
    trace.final_u = surface.u;
    throw FlowBreakdown("initial mean curvature below the floor", trace, surface);
  }

  double t = 0.0;
  trace.samples.push_back({0.0, geo.f, 0.0});
  std::size_t sample_index = 1;
  auto sample_time = [&](std::size_t k) {
    const double tk = static_cast<double>(k) * config.record_interval;
    return config.t_end - tk < 1e-9 * config.record_interval ? config.t_end : tk;
  };

  std::size_t steps = 0;
  double last_dt = 0.0;
  while (t < config.t_end) {
    const double target = sample_time(sample_index);
    double dt = std::min({stable_dt(surface, geo, config.cfl_safety), config.dt_max, target - t});
    bool lands_on_sample = dt == target - t;
    StepResult step;
    for (int attempt = 0;; ++attempt) {
      step = flow_step(surface, geo, dt, h_floor, config.cfl_safety);
      if (step.status != StepStatus::rejected) break;
      ++trace.rejected_steps;
      if (attempt >= 40) {
        trace.final_u = surface.u;
        throw FlowBreakdown("step size underflow at t = " + std::to_string(t), trace, surface);
      }
      dt *= 0.5;
      lands_on_sample = false;
    }
    if (step.status == StepStatus::breakdown) {
      trace.final_u = step.surface.u.grid ? step.surface.u : surface.u;
      throw FlowBreakdown("flow breakdown at t = " + std::to_string(t + dt) + ": " + step.reason, trace,
                          step.surface.u.grid ? step.surface : surface);
    }
    surface = std::move(step.surface);
    geo = std::move(step.geometry);
    t = lands_on_sample ? target : t + dt;
    last_dt = dt;
    trace.dt_history.push_back(dt);
    if (t >= target) {
      trace.samples.push_back({t, geo.f, last_dt});
      ++sample_index;
    }
    if (++steps > config.max_steps) {
      trace.final_u = surface.u;
      throw FlowBreakdown("maximum step count exceeded", trace, surface);
    }
  }
  trace.final_u = surface.u;
  return trace;
}

bool MonitorReport::all_passed() const {
  return std::all_of(monitors.begin(), monitors.end(),
                     [](const MonitorResult& m) { return !m.asserted || m.passed; });
}

const MonitorResult* MonitorReport::find(const std::string& name) const {
  for (const auto& m : monitors)
    if (m.name == name) return &m;
  return nullptr;
}

double gradient_decay_slope(const FlowTrace& trace, double t_from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& s : trace.samples) {
    if (s.t < t_from || !(s.f.grad_sup > 0.0)) continue;
    const double y = std::log(s.f.grad_sup);
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / denom;
}

MonitorReport monotonicity_report(const FlowTrace& trace, const MonitorTolerances& tol) {
  MonitorReport report;
  const auto& s = trace.samples;
  if (s.empty()) throw DomainError("monotonicity report needs a non-empty trace");
  const int n = trace.n;
  const double growth = 1.0 / (n - 1.0);

  {
    MonitorResult r{"q1_monotone", true, true, 0.0, tol.q1_relative * std::abs(s[0].f.Q1) + tol.q1_absolute, {}, ""};
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const double jump = s[k + 1].f.Q1 - s[k].f.Q1;
      r.value = std::max(r.value, jump);
      if (jump > r.tolerance) r.flagged.push_back(k);
    }
    r.passed = r.flagged.empty();
    r.detail = "largest increase of Q1 between consecutive samples";
    report.monitors.push_back(r);
  }
  {
    MonitorResult lo{"barrier_lower", true, true, 0.0, tol.barrier_relative, {}, ""};
    MonitorResult hi{"barrier_upper", true, true, 0.0, tol.barrier_relative, {}, ""};
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double factor = std::exp(growth * s[k].t);
      const double lower = s[0].f.lambda_min * factor;
      const double upper = s[0].f.lambda_max * factor;
      const double under = (lower - s[k].f.lambda_min) / lower;
      const double over = (s[k].f.lambda_max - upper) / upper;
      lo.value = std::max(lo.value, under);
      hi.value = std::max(hi.value, over);
      if (under > lo.tolerance) lo.flagged.push_back(k);
      if (over > hi.tolerance) hi.flagged.push_back(k);
    }
    lo.passed = lo.flagged.empty();
    hi.passed = hi.flagged.empty();
    lo.detail = "relative undershoot of lambda(u_min) below the inner slice solution";
    hi.detail = "relative overshoot of lambda(u_max) above the outer slice solution";
    report.monitors.push_back(lo);
    report.monitors.push_back(hi);
  }
  {
    MonitorResult r{"area_law", true, true, 0.0, tol.area_law, {}, ""};
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double dev = std::abs(std::log(s[k].f.area / s[0].f.area) - s[k].t);
      r.value = std::max(r.value, dev);
      if (dev > r.tolerance) r.flagged.push_back(k);
    }
    r.passed = r.flagged.empty();
    r.detail = "max |log(area/area0) - t|";
    report.monitors.push_back(r);
  }
  {
    MonitorResult r{"p_rate", true, true, 0.0, tol.p_rate_relative, {}, ""};
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
      const double h0 = s[k].t - s[k - 1].t, h1 = s[k + 1].t - s[k].t;
      const double deriv = (-h1 / (h0 * (h0 + h1))) * s[k - 1].f.int_p +
                           ((h1 - h0) / (h0 * h1)) * s[k].f.int_p +
                           (h0 / (h1 * (h0 + h1))) * s[k + 1].f.int_p;
      const double expected = n * s[k].f.int_V_over_H;
      const double err = std::abs(deriv - expected) / std::abs(expected);
      r.value = std::max(r.value, err);
      if (err > r.tolerance) r.flagged.push_back(k);
    }
    r.passed = r.flagged.empty();
    r.detail = "relative error of d/dt int p against n int V/H (central differences)";
    report.monitors.push_back(r);
  }
  {
    MonitorResult r{"q2_monotone", true, true, 0.0, tol.q1_relative * std::abs(s[0].f.Q2) + tol.q1_absolute, {}, ""};
    std::size_t checked = 0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      if (s[k].f.J > s[k].f.K || s[k + 1].f.J > s[k + 1].f.K) continue;
      ++checked;
      const double jump = s[k + 1].f.Q2 - s[k].f.Q2;
      r.value = std::max(r.value, jump);
      if (jump > r.tolerance) r.flagged.push_back(k);
    }
    r.passed = r.flagged.empty();
    r.detail = "largest increase of Q2 while J <= K (" + std::to_string(checked) + " intervals checked)";
    report.monitors.push_back(r);
  }
  {
    const double bound = q1_limit(n, trace.kappa, trace.theta);
    MonitorResult r{"q1_liminf", true, true, 0.0, tol.liminf, {}, ""};
    r.value = bound - s.back().f.Q1;
    r.passed = r.value <= tol.liminf;
    if (!r.passed) r.flagged.push_back(s.size() - 1);
    r.detail = "shortfall of final Q1 below (n-1) kappa theta^(1/(n-1))";
    report.monitors.push_back(r);
  }
  {
    MonitorResult r{"j_minus_k", false, true, 0.0, 0.0, {}, ""};
    r.value = -std::numeric_limits<double>::infinity();
    for (const auto& x : s) r.value = std::max(r.value, x.f.J - x.f.K);
    r.detail = "largest J - K over the trace (sign diagnostic, not asserted)";
    report.monitors.push_back(r);
  }
  {
    MonitorResult r{"h_limit", false, true, 0.0, tol.h_limit, {}, ""};
    const auto& last = s.back().f;
    r.value = std::max(std::abs(last.H_max - (n - 1)), std::abs(last.H_min - (n - 1)));
    r.passed = r.value <= tol.h_limit;
    r.detail = "max |H - (n-1)| at the final sample";
    report.monitors.push_back(r);
  }
  {
    MonitorResult r{"gradient_decay", false, true, 0.0, tol.gradient_slope_relative, {}, ""};
    const double slope = gradient_decay_slope(trace, 0.5 * s.back().t);
    r.value = slope;
    const double expected = -growth;
    r.passed = std::isnan(slope) || std::abs(slope - expected) <= tol.gradient_slope_relative * std::abs(expected);
    r.detail = std::isnan(slope) ? "gradient vanishes; no slope fitted"
                                 : "fitted slope of log sup|grad phi| over the second half of the run";
    report.monitors.push_back(r);
  }
  return report;
}

}  // namespace kflow

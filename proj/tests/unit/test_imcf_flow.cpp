#include <gtest/gtest.h>

#include <cmath>

#include "kflow/imcf_flow.hpp"

using namespace kflow;

namespace {

constexpr double kTorusTheta = 4 * M_PI * M_PI;

struct Background {
  std::shared_ptr<const BaseGrid> grid;
  std::shared_ptr<const WarpTable> warp;
};

Background torus(int res) {
  return {make_grid({GridMode::torus2d, res, 2 * M_PI, 2, kTorusTheta, 0}),
          std::make_shared<const WarpTable>(WarpTable::build(SpaceParams::make(3, 0, 0.5, kTorusTheta)))};
}

Background symmetric(int n, int kappa, double m, double theta) {
  return {make_grid({GridMode::symmetric, 8, 0.0, n - 1, theta, kappa}),
          std::make_shared<const WarpTable>(WarpTable::build(SpaceParams::make(n, kappa, m, theta)))};
}

FlowConfig config(double t_end, double dt_max = 0.02) {
  FlowConfig c;
  c.t_end = t_end;
  c.dt_max = dt_max;
  return c;
}

// Error of the final level against the exact slice solution lambda0 e^(t/(n-1)).
double slice_error(const Background& bg, double level, double t_end, double dt_max) {
  const auto trace = run_flow(slice_surface(bg.grid, bg.warp, bg.warp->radius_of(level)), config(t_end, dt_max));
  const int n = bg.warp->params().n;
  const double exact = level * std::exp(t_end / (n - 1));
  return std::abs(bg.warp->lambda(trace.final_u[0]) - exact) / exact;
}

}  // namespace

TEST(ImcfFlow, ConfigValidationNamesFields) {
  FlowConfig c;
  c.t_end = -1.0;
  c.cfl_safety = 2.0;
  c.integrator = "euler";
  try {
    c.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.offending_paths, (std::vector<std::string>{"flow.t_end", "flow.cfl_safety", "flow.integrator"}));
  }
  EXPECT_DOUBLE_EQ(FlowConfig{}.h_floor_for(3), 2e-4);
}

TEST(ImcfFlow, SymmetricSliceIsSecondOrderInTime) {
  const auto bg = symmetric(4, -1, 0.05, 4 * M_PI);
  const double coarse = slice_error(bg, 1.5, 2.0, 0.04), fine = slice_error(bg, 1.5, 2.0, 0.02);
  EXPECT_GT(coarse / fine, 3.5);
  EXPECT_LT(coarse / fine, 4.5);
  EXPECT_LT(fine, 1e-5);
}

TEST(ImcfFlow, TorusSliceStaysSlice) {
  const auto bg = torus(16);
  const auto trace = run_flow(slice_surface(bg.grid, bg.warp, bg.warp->radius_of(2.0)), config(1.0));
  for (double u : trace.final_u.values) EXPECT_EQ(u, trace.final_u[0]);
  for (const auto& s : trace.samples) {
    EXPECT_EQ(s.f.grad_sup, 0.0);
    EXPECT_NEAR(std::log(s.f.area / trace.samples[0].f.area), s.t, 1e-5);
  }
}

TEST(ImcfFlow, SamplesLandOnRecordTimes) {
  const auto bg = symmetric(3, 0, 0.5, 1.0);
  FlowConfig c = config(1.03);
  c.record_interval = 0.1;
  const auto trace = run_flow(slice_surface(bg.grid, bg.warp, 1.0), c);
  ASSERT_EQ(trace.samples.size(), 12u);
  for (std::size_t k = 0; k + 1 < trace.samples.size(); ++k) EXPECT_NEAR(trace.samples[k].t, 0.1 * k, 1e-12);
  EXPECT_DOUBLE_EQ(trace.samples.back().t, 1.03);
}

// Fields depending on x only must stay x-only: every row of u is identical.
TEST(ImcfFlow, PreservesTranslationSymmetry) {
  const auto bg = torus(32);
  const double r0 = bg.warp->radius_of(2.0);
  std::vector<double> u(bg.grid->size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = r0 * (1.0 + 0.05 * std::cos(bg.grid->x[i]));
  const auto trace = run_flow(GraphSurface(ScalarField(bg.grid, u), bg.warp), config(0.5));
  const std::size_t nx = bg.grid->nx;
  for (std::size_t j = 1; j < bg.grid->ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) ASSERT_EQ(trace.final_u[j * nx + i], trace.final_u[i]);
  // ... and the reflection x -> -x.
  for (std::size_t i = 1; i < nx; ++i) EXPECT_NEAR(trace.final_u[i], trace.final_u[nx - i], 1e-13);
}

TEST(ImcfFlow, StepRejectsUnstableSize) {
  const auto bg = torus(32);
  const auto s = random_star_shaped(bg.grid, bg.warp, 1, 0.05, bg.warp->radius_of(2.0));
  const auto geo = compute_geometry(s);
  const double stable = stable_dt(s, geo, 0.2);
  EXPECT_GT(stable, 0.0);
  EXPECT_EQ(flow_step(s, geo, 10 * stable, 1e-4).status, StepStatus::rejected);
  EXPECT_EQ(flow_step(s, geo, 0.5 * stable, 1e-4).status, StepStatus::accepted);
  const auto sym = symmetric(3, 0, 0.5, 1.0);
  const auto slice = slice_surface(sym.grid, sym.warp, 1.0);
  EXPECT_TRUE(std::isinf(stable_dt(slice, compute_geometry(slice), 0.2)));
}

TEST(ImcfFlow, BreakdownCarriesPartialTrace) {
  // kappa = 1, m = 0.1: H = 2 lambda'/lambda decreases from 2.68 towards 2.
  const auto bg = symmetric(3, 1, 0.1, 4 * M_PI);
  FlowConfig c = config(5.0);
  c.H_floor = 2.3;
  const auto slice = slice_surface(bg.grid, bg.warp, bg.warp->radius_of(1.0));
  try {
    run_flow(slice, c);
    FAIL() << "expected FlowBreakdown";
  } catch (const FlowBreakdown& e) {
    EXPECT_GT(e.trace.samples.size(), 1u);
    EXPECT_FALSE(e.trace.final_u.values.empty());
    EXPECT_LT(e.trace.samples.back().t, 5.0);
  }
  c.H_floor = 3.0;
  try {
    run_flow(slice, c);
    FAIL() << "expected FlowBreakdown";
  } catch (const FlowBreakdown& e) {
    EXPECT_TRUE(e.trace.samples.empty());
    EXPECT_EQ(e.trace.final_u.values, slice.u.values);
  }
}

TEST(ImcfFlow, LeavingTheTableIsBreakdown) {
  const auto bg = symmetric(3, 0, 0.5, 1.0);
  const auto warp = std::make_shared<const WarpTable>(WarpTable::build(bg.warp->params(), 3.0));
  EXPECT_THROW(run_flow(slice_surface(bg.grid, warp, 1.0), config(20.0)), FlowBreakdown);
}

TEST(Monitors, CleanRunPassesAndReportsAllMonitors) {
  const auto bg = torus(32);
  const auto s = random_star_shaped(bg.grid, bg.warp, 2, 0.05, bg.warp->radius_of(2.0));
  const auto trace = run_flow(s, config(2.0, 0.04));
  const auto report = monotonicity_report(trace);
  EXPECT_TRUE(report.all_passed());
  for (const char* name : {"q1_monotone", "barrier_lower", "barrier_upper", "area_law", "p_rate", "q2_monotone",
                           "q1_liminf", "j_minus_k", "h_limit", "gradient_decay"})
    EXPECT_NE(report.find(name), nullptr) << name;
  EXPECT_FALSE(report.find("h_limit")->asserted);
}

// Tampered traces must be caught at the tampered interval.
TEST(Monitors, AdversarialTracesAreFlagged) {
  const auto bg = torus(16);
  const auto s = random_star_shaped(bg.grid, bg.warp, 2, 0.05, bg.warp->radius_of(2.0));
  const auto clean = run_flow(s, config(1.0, 0.04));
  ASSERT_GT(clean.samples.size(), 10u);

  auto q1 = clean;
  q1.samples[6].f.Q1 += 1e-3;
  const auto r1 = monotonicity_report(q1);
  EXPECT_FALSE(r1.find("q1_monotone")->passed);
  EXPECT_EQ(r1.find("q1_monotone")->flagged, std::vector<std::size_t>{5});

  auto area = clean;
  area.samples[4].f.area *= 1.001;
  EXPECT_EQ(monotonicity_report(area).find("area_law")->flagged, std::vector<std::size_t>{4});

  auto barrier = clean;
  barrier.samples[8].f.lambda_min *= 0.99;
  barrier.samples[9].f.lambda_max *= 1.01;
  const auto rb = monotonicity_report(barrier);
  EXPECT_EQ(rb.find("barrier_lower")->flagged, std::vector<std::size_t>{8});
  EXPECT_EQ(rb.find("barrier_upper")->flagged, std::vector<std::size_t>{9});

  auto liminf = clean;
  liminf.kappa = 1;  // a spherical bound is far above the flat-torus Q1
  EXPECT_FALSE(monotonicity_report(liminf).find("q1_liminf")->passed);
  EXPECT_FALSE(monotonicity_report(q1).all_passed());
}

TEST(Monitors, GradientSlopeOfSyntheticTrace) {
  FlowTrace t;
  for (int k = 0; k <= 20; ++k) {
    FlowSample s;
    s.t = 0.5 * k;
    s.f.grad_sup = 3.0 * std::exp(-0.5 * s.t);
    t.samples.push_back(s);
  }
  EXPECT_NEAR(gradient_decay_slope(t, 0.0), -0.5, 1e-12);
  for (auto& s : t.samples) s.f.grad_sup = 0.0;
  EXPECT_TRUE(std::isnan(gradient_decay_slope(t, 0.0)));
  EXPECT_THROW(monotonicity_report(FlowTrace{}), DomainError);
}

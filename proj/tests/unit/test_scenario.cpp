#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kflow/error.hpp"
#include "kflow/report_io.hpp"
#include "kflow/scenario.hpp"

using namespace kflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kflow-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json minimal_flow() {
  return json::parse(R"({"name": "mini", "kind": "flow", "space": {"n": 3, "kappa": 0, "m": 0.5},
                         "grid": {"mode": "torus2d", "resolution": 16},
                         "flow": {"t_end": 0.3, "record_interval": 0.1}})");
}

std::vector<std::string> offending(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const ConfigError& e) {
    return e.offending_paths;
  }
  return {};
}

}  // namespace

TEST(Scenario, ShippedScenariosParseAndRoundTrip) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(KFLOW_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const Scenario s = parse_scenario(entry.path());
    EXPECT_EQ(s.name, entry.path().stem().string());
    const json once = scenario_to_json(s);
    EXPECT_EQ(normalize_scenario(once), once) << entry.path();
  }
  EXPECT_GE(count, 8u);
}

TEST(Scenario, DefaultsAndDerivedTheta) {
  const Scenario s = scenario_from_json(minimal_flow());
  EXPECT_NEAR(s.space.theta, 4 * M_PI * M_PI, 1e-12);
  EXPECT_EQ(s.flow.integrator, "rk2_adaptive");
  EXPECT_EQ(s.checks.size(), 7u);
  json sphere = json::parse(R"({"name": "s", "kind": "slice-check", "space": {"n": 4, "kappa": 1, "m": 0.5},
                                "grid": {"mode": "sphere_axisym"}})");
  EXPECT_NEAR(scenario_from_json(sphere).space.theta, 2 * M_PI * M_PI, 1e-12);
}

TEST(Scenario, CollectsEveryOffendingPath) {
  json doc = minimal_flow();
  doc["space"]["mass"] = 1.0;
  doc["grid"]["resolution"] = 4;
  doc["flow"]["t_end"] = -1.0;
  doc["checks"] = {"q1_monotone", "not_a_monitor"};
  doc["extra"] = true;
  const auto paths = offending(doc);
  for (const char* p : {"space.mass", "grid.resolution", "flow.t_end", "checks[1]", "extra"})
    EXPECT_NE(std::find(paths.begin(), paths.end(), p), paths.end()) << p;
}

TEST(Scenario, RejectsInconsistentCombinations) {
  json doc = minimal_flow();
  doc["space"]["kappa"] = 1;
  EXPECT_FALSE(offending(doc).empty());
  doc = minimal_flow();
  doc["space"]["theta"] = 2.0;
  EXPECT_EQ(offending(doc), std::vector<std::string>{"space.theta"});
  doc = minimal_flow();
  doc["grid"] = {{"mode", "symmetric"}};
  EXPECT_EQ(offending(doc), std::vector<std::string>{"space.theta"});
  doc = minimal_flow();
  doc["name"] = "../escape";
  EXPECT_EQ(offending(doc), std::vector<std::string>{"name"});
  doc = minimal_flow();
  doc["space"]["n"] = 2;
  EXPECT_FALSE(offending(doc).empty());
  EXPECT_THROW(scenario_from_json(json::array()), ConfigError);
}

TEST(Scenario, FlowRunWritesArtifacts) {
  const fs::path out = scratch("flow");
  RunOptions opts;
  opts.out_dir = out;
  opts.quiet = true;
  Scenario s = scenario_from_json(minimal_flow());
  s.initial.type = "random";
  s.initial.amplitude = 0.05;
  ASSERT_EQ(run_scenario(s, opts), kExitPass);
  for (const char* f : {"scenario.json", "trace.csv", "trace.json", "final_u.csv", "report.json", "plots/q1.svg",
                        "plots/area_law.svg", "plots/h_max.svg"})
    EXPECT_TRUE(fs::exists(out / "mini" / f)) << f;
  const json report = json::parse(slurp(out / "mini" / "report.json"));
  EXPECT_TRUE(report.at("passed").get<bool>());
  EXPECT_TRUE(report.at("breakdown").is_null());
  std::istringstream csv(slurp(out / "mini" / "trace.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,area,intVH,intP,J,K,Q1,Q2,Hmin,Hmax,grad_sup,umin,umax,dt");
  // Re-running with the same seed reproduces every byte.
  const std::string first = slurp(out / "mini" / "trace.csv");
  const std::string plot = slurp(out / "mini" / "plots" / "q1.svg");
  ASSERT_EQ(run_scenario(s, opts), kExitPass);
  EXPECT_EQ(slurp(out / "mini" / "trace.csv"), first);
  EXPECT_EQ(slurp(out / "mini" / "plots" / "q1.svg"), plot);
  fs::remove_all(out);
}

TEST(Scenario, BreakdownIsMonitorFailure) {
  const fs::path out = scratch("breakdown");
  RunOptions opts;
  opts.out_dir = out;
  opts.quiet = true;
  json doc = minimal_flow();
  doc["flow"]["H_floor"] = 50.0;
  EXPECT_EQ(run_scenario(scenario_from_json(doc), opts), kExitMonitorFailure);
  const json report = json::parse(slurp(out / "mini" / "report.json"));
  EXPECT_FALSE(report.at("passed").get<bool>());
  EXPECT_TRUE(report.at("breakdown").is_string());
  fs::remove_all(out);
}

TEST(Scenario, OverridesApply) {
  const fs::path out = scratch("override");
  RunOptions opts;
  opts.out_dir = out;
  opts.quiet = true;
  opts.resolution = 12;
  opts.seed = 42;
  json doc = minimal_flow();
  doc["kind"] = "check-inequalities";
  doc.erase("flow");
  doc["sampling"] = {{"samples", 3}};
  EXPECT_EQ(run_scenario(scenario_from_json(doc), opts), kExitPass);
  const json written = json::parse(slurp(out / "mini" / "scenario.json"));
  EXPECT_EQ(written["grid"]["resolution"], 12);
  EXPECT_EQ(written["sampling"]["seed"], 42);
  fs::remove_all(out);
}

TEST(ReportIo, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310, 1e300})
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
}

TEST(ReportIo, SvgIsDeterministicAndEscaped) {
  const std::vector<double> xs = {0, 1, 2}, ys = {1, 1, 1};
  const std::string a = render_line_svg("a<b & c", "t", "y", xs, ys);
  EXPECT_EQ(a, render_line_svg("a<b & c", "t", "y", xs, ys));
  EXPECT_NE(a.find("a&lt;b &amp; c"), std::string::npos);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_THROW(render_line_svg("x", "t", "y", {}, {}), DomainError);
  EXPECT_THROW(emit_plots(FlowTrace{}, scratch("noplot")), DomainError);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kflow/alh_mass.hpp"
#include "kflow/base_grid.hpp"
#include "kflow/imcf_flow.hpp"
#include "kflow/kottler.hpp"

namespace kflow {

enum class ScenarioKind { flow, mass, inequalities, slice_check, beckner };

const char* scenario_kind_name(ScenarioKind kind);

struct InitialSurfaceSpec {
  std::string type = "slice";  // "slice" or "random"
  double lambda = 2.0;         // level lambda(u) of the slice / base of the perturbation
  std::uint64_t seed = 0;
  double amplitude = 0.0;
};

struct MassScenarioSpec {
  std::string profile = "kottler";  // "kottler" or "mass_function"
  double m_graph = 1.0;
  MassFunctionSpec mass_function;
  std::vector<double> schedule = {50.0, 100.0, 200.0};
  std::vector<double> identity_schedule = {1e3, 2e3, 4e3};
};

struct SampleSpec {
  int samples = 20;
  double amplitude = 0.1;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::flow;
  SpaceParams space;
  GridSpec grid;
  double warp_r_max = 25.0;
  int warp_nodes = 4000;
  InitialSurfaceSpec initial;
  FlowConfig flow;
  std::vector<std::string> checks;  // asserted monitors (flow)
  MassScenarioSpec mass;
  SampleSpec sampling;              // inequalities and beckner
  std::vector<double> slice_levels = {1.5, 2.0, 4.0};
  bool plots = true;
};

/// Monitor names that may appear in "checks".
const std::vector<std::string>& known_monitors();

/// Validates a parsed JSON document; throws ConfigError listing every
/// offending key path.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// serialize(parse(x)): the canonical form with defaults filled in.
nlohmann::json normalize_scenario(const nlohmann::json& doc);

Scenario parse_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = "kflow-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  bool quiet = false;
};

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitMonitorFailure = 2 };

/// Executes the scenario, writes artifacts under out_dir/name and returns
/// 0 (all asserted checks pass), 2 (a check failed) or 1 (runtime error).
int run_scenario(const Scenario& scenario, const RunOptions& options);

/// Builds the shared background pieces for a scenario.
std::shared_ptr<const BaseGrid> scenario_grid(const Scenario& scenario);
SpaceParams scenario_space(const Scenario& scenario);

}  // namespace kflow

// kflow: scenario-driven front end for the IMCF / ALH mass laboratory.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kflow/error.hpp"
#include "kflow/report_io.hpp"
#include "kflow/scenario.hpp"
#include "kflow/warp_table.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "kflow-out";
  std::uint64_t seed = 0;
  int resolution = 0;
  bool quiet = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* res_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* c = cmd->add_option("--config", f.config, "scenario JSON file");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  f.seed_opt = cmd->add_option("--seed", f.seed, "override the scenario seed");
  f.res_opt = cmd->add_option("--resolution", f.resolution, "override the grid resolution")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", f.quiet, "suppress the summary line");
}

kflow::RunOptions options_from(const CommonFlags& f) {
  kflow::RunOptions o;
  o.out_dir = f.out;
  o.quiet = f.quiet;
  if (*f.seed_opt) o.seed = f.seed;
  if (*f.res_opt) o.resolution = f.resolution;
  return o;
}

kflow::Scenario load(const std::string& path, const char* kind) {
  std::ifstream in(path);
  if (!in) throw kflow::ConfigError("cannot read " + path, {path});
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw kflow::ConfigError(std::string("malformed JSON: ") + e.what(), {"$"});
  }
  if (doc.is_object() && !doc.contains("kind")) doc["kind"] = kind;
  kflow::Scenario s = kflow::scenario_from_json(doc);
  if (std::string(kflow::scenario_kind_name(s.kind)) != kind)
    throw kflow::ConfigError(std::string("scenario kind '") + kflow::scenario_kind_name(s.kind) +
                                 "' does not match subcommand '" + kind + "'",
                             {"kind"});
  return s;
}

int run_single(const CommonFlags& flags, const char* kind) {
  try {
    return kflow::run_scenario(load(flags.config, kind), options_from(flags));
  } catch (const kflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kflow::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kflow::kExitError;
  }
}

unsigned thread_cap() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  return threads;
}

int run_all(const CommonFlags& flags, const std::string& scenario_dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(scenario_dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no scenarios found in " << scenario_dir << '\n';
    return kflow::kExitError;
  }
  std::vector<int> codes(files.size(), kflow::kExitError);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        codes[i] = kflow::run_scenario(kflow::parse_scenario(files[i]), options_from(flags));
      } catch (const std::exception& e) {
        std::cerr << files[i].filename().string() << ": " << e.what() << '\n';
        codes[i] = kflow::kExitError;
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (std::count(codes.begin(), codes.end(), kflow::kExitError)) return kflow::kExitError;
  if (std::count(codes.begin(), codes.end(), kflow::kExitMonitorFailure)) return kflow::kExitMonitorFailure;
  return kflow::kExitPass;
}

int run_warp(const CommonFlags& flags) {
  try {
    const kflow::Scenario s = kflow::parse_scenario(flags.config);
    const auto table = kflow::WarpTable::build(kflow::scenario_space(s), s.warp_r_max, 1e-12,
                                               static_cast<std::size_t>(s.warp_nodes));
    std::ostringstream csv;
    table.write_csv(csv);
    const auto path = std::filesystem::path(flags.out) / s.name / "warp.csv";
    kflow::write_text_file(path, csv.str());
    if (!flags.quiet) std::cout << "wrote " << path.string() << '\n';
    return kflow::kExitPass;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kflow::kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse mean curvature flow and ALH mass checks in Kottler spaces"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    CommonFlags flags;
    CLI::App* cmd = nullptr;
  };
  std::vector<Sub> subs = {{"flow", "run an IMCF scenario and its monitors", {}},
                           {"mass", "compute the mass of a radial graph and check the identities", {}},
                           {"check-inequalities", "evaluate the deficits on random mean-convex graphs", {}},
                           {"slice-check", "equality cases on coordinate slices", {}},
                           {"beckner", "Beckner-type deficit on random positive fields", {}}};
  for (auto& s : subs) {
    s.cmd = app.add_subcommand(s.name, s.help);
    add_common(s.cmd, s.flags, true);
  }
  CommonFlags all_flags;
  std::string scenario_dir = KFLOW_SCENARIO_DIR;
  auto* all = app.add_subcommand("all", "run every shipped scenario");
  add_common(all, all_flags, false);
  all->add_option("--scenarios", scenario_dir, "directory of scenario files")->capture_default_str();

  CommonFlags warp_flags;
  auto* warp = app.add_subcommand("warp", "dump the warp table lambda(r) of a scenario as CSV");
  add_common(warp, warp_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kflow::kExitError;
  }

  for (auto& s : subs)
    if (*s.cmd) return run_single(s.flags, s.name);
  if (*all) return run_all(all_flags, scenario_dir);
  if (*warp) return run_warp(warp_flags);
  return kflow::kExitError;
}

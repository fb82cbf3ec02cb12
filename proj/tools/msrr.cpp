#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msrr/executor.hpp"

namespace fs = std::filesystem;
using namespace msrr;

namespace {

enum Exit : int {
  kOk = 0,
  kMissionFailed = 1,
  kUsage = 2,
  kParse = 3,
  kUnrealizable = 4,
  kRuntime = 5,
};

struct Bundle {
  std::string scenario;
  std::string spec;
  std::string library = std::string(MSRR_DATA_DIR) + "/library/default_library.json";
  std::string plans = std::string(MSRR_DATA_DIR) + "/plans";
};

// A directory argument names a bundle holding scenario.json and mission.spec.
void resolve_bundle(Bundle& b) {
  if (fs::is_directory(b.scenario)) {
    const fs::path dir = b.scenario;
    if (b.spec.empty()) b.spec = (dir / "mission.spec").string();
    b.scenario = (dir / "scenario.json").string();
  }
}

void check_exists(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::exists(path)) throw ParseError(what + " not found: " + path);
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FaultProfile apply_faults(FaultProfile p, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--fault expects <category>=<p>, got '" + o + "'");
    const std::string cat = o.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(o.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--fault: bad probability in '" + o + "'");
    }
    if (cat == "hardware") p.hardware = value;
    else if (cat == "navigation") p.navigation = value;
    else if (cat == "perception") p.perception = value;
    else if (cat == "network") p.network = value;
    else throw UsageError("--fault: unknown category '" + cat + "'");
  }
  p.validate();
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

int cmd_run(Bundle b, std::uint64_t seed, std::optional<std::uint64_t> ticks, const std::vector<std::string>& faults,
            const std::string& out_dir) {
  resolve_bundle(b);
  check_exists(b.scenario, "scenario");
  check_exists(b.spec, "spec");
  check_exists(b.library, "library");
  check_exists(b.plans, "plans directory");
  const Scenario scenario = load_scenario(b.scenario);
  const MissionSpec spec = load_spec(b.spec);
  const Library lib = load_library(b.library);
  const auto plans = load_plans(b.plans);

  MissionOptions options;
  options.seed = seed;
  options.tick_budget = ticks;
  options.faults = apply_faults(scenario.faults, faults);
  const MissionResult result = run_mission(scenario, spec, lib, plans, options);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "events.jsonl", to_jsonl(result.events));
  write_file(fs::path(out_dir) / "map.txt", dump_map(result.grid));
  const MissionSummary& s = result.summary;
  nlohmann::json summary{{"result", s.complete ? "mission_complete" : "mission_failed"},
                         {"ticks", s.ticks},
                         {"reconfigurations", s.reconfigurations},
                         {"distance", s.distance},
                         {"final_configuration", s.final_configuration}};
  if (!s.complete) summary["failure"] = s.failure;
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

  std::cout << summary.dump() << "\n";
  if (s.failure == "unrealizable") {
    std::cerr << "unrealizable: " << result.events.back().payload << "\n";
    return kUnrealizable;
  }
  return s.complete ? kOk : kMissionFailed;
}

int cmd_synth(const std::string& path) {
  check_exists(path, "spec");
  const MissionSpec spec = load_spec(path);
  const auto outcome = synthesize(spec);
  if (const auto* u = std::get_if<Unrealizable>(&outcome)) {
    std::cout << "unrealizable: " << u->reason << "\n";
    for (std::size_t i = 0; i < u->counter_trace.size(); ++i)
      std::cout << "  env step " << i << ": " << spec.describe(u->counter_trace[i], Side::Env) << "\n";
    return kUnrealizable;
  }
  std::cout << std::get<MissionAutomaton>(outcome).dump();
  return kOk;
}

int cmd_characterize(Bundle b, const std::string& object) {
  resolve_bundle(b);
  check_exists(b.scenario, "scenario");
  check_exists(b.library, "library");
  const Scenario scenario = load_scenario(b.scenario);
  const Library lib = load_library(b.library);
  const WorldState world = make_world(scenario, lib);
  const OccupancyGrid grid = observed_grid(world);

  // An object id from the scenario, or a color naming a colored surface.
  std::optional<DetectedObject> target;
  for (const auto& o : world.objects) {
    if (o.id != object || o.carried_by) continue;
    const Index3 cell = grid.shape().cell_of(o.position);
    for (const auto& d : detect_objects(grid, {o.color}))
      if (std::find(d.support.begin(), d.support.end(), cell) != d.support.end()) target = d;
  }
  if (!target) {
    try {
      const auto found = detect_objects(grid, {parse_color(object)});
      if (!found.empty()) target = found.front();
    } catch (const ParseError&) {
    }
  }
  if (!target) {
    std::cerr << "error: unknown object id '" << object << "'\n";
    return kRuntime;
  }
  const CharacterizationParams params;
  const Characterization ch = characterize(grid, *target, world.robot.base, params);
  std::cout << "object " << object << " color " << to_string(target->color) << " centroid " << target->centroid.x
            << ' ' << target->centroid.y << ' ' << target->centroid.z << "\n";
  std::cout << "env " << to_string(ch.env_type) << "\n";
  std::cout << "distance " << ch.closest_reachable_distance << "\n";
  std::cout << "waypoint " << ch.staging_waypoint.position.x << ' ' << ch.staging_waypoint.position.y << ' '
            << ch.staging_waypoint.heading << "\n";
  std::cout << characterization_debug(grid, *target, ch, params);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and autonomy stack for a modular self-reconfigurable robot"};
  app.require_subcommand(1);

  Bundle run_bundle;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> ticks;
  std::vector<std::string> faults;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Run a mission and write events.jsonl, map.txt and summary.json");
  run->add_option("--scenario", run_bundle.scenario, "Scenario JSON or bundle directory")->required();
  run->add_option("--spec", run_bundle.spec, "Mission specification");
  run->add_option("--library", run_bundle.library, "Behavior library JSON");
  run->add_option("--plans", run_bundle.plans, "Directory of reconfiguration plans");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--ticks", ticks, "Tick budget");
  run->add_option("--fault", faults, "Fault probability override, <category>=<p>");
  run->add_option("--out", out_dir, "Output directory");

  std::string spec_path;
  auto* synth = app.add_subcommand("synth", "Synthesize a mission automaton and print its transition table");
  synth->add_option("spec", spec_path, "Mission specification")->required();

  Bundle char_bundle;
  std::string object;
  auto* chr = app.add_subcommand("characterize", "Characterize the terrain around an object of a scenario");
  chr->add_option("--scenario", char_bundle.scenario, "Scenario JSON or bundle directory")->required();
  chr->add_option("--library", char_bundle.library, "Behavior library JSON");
  chr->add_option("--object", object, "Object id, or a color")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_bundle, seed, ticks, faults, out_dir);
    if (*synth) return cmd_synth(spec_path);
    if (*chr) return cmd_characterize(char_bundle, object);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

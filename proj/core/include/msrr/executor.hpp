#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msrr/envchar.hpp"
#include "msrr/library.hpp"
#include "msrr/mapping.hpp"
#include "msrr/nav.hpp"
#include "msrr/reconfig.hpp"
#include "msrr/scenario.hpp"
#include "msrr/synth.hpp"
#include "msrr/world.hpp"

namespace msrr {

enum class MissionEventKind {
  ObjectDetected,
  Characterized,
  StateTransition,
  BehaviorStarted,
  BehaviorDone,
  ReconfigStarted,
  ReconfigDone,
  MissionComplete,
  MissionFailed,
};
std::string_view to_string(MissionEventKind k);

struct MissionEvent {
  std::uint64_t tick = 0;
  MissionEventKind kind;
  std::string payload;  // compact JSON object
};

/// One JSON object per line: {"tick":..,"kind":..,"payload":{..}}.
std::string to_jsonl(const std::vector<MissionEvent>& events);

/// Perceived facts the environment propositions are evaluated against.
struct Percepts {
  std::vector<DetectedObject> detections;
  std::set<Color> pending_colors;  // detected objects still to be handled
  std::optional<EnvironmentType> characterization;
  bool carrying = false;
  bool exploration_done = false;
};

/// Sensing functions: seen(c), pending(c, ...), env_type_is(t), carrying,
/// exploration_done. Throws Error for an unknown function.
Valuation evaluate_propositions(const MissionSpec& spec, const Percepts& percepts);

class NoCapableEntry : public Error {
 public:
  NoCapableEntry(std::string_view property, EnvironmentType env)
      : Error("no library entry provides " + std::string(property) + " in " + std::string(to_string(env)) +
              " environments") {}
};

struct Selection {
  LibraryEntry entry;
  bool reconfigure = false;
};

/// Prefers an entry of the current configuration; otherwise picks uniformly
/// at random among candidates whose configuration is in `reachable` (all
/// candidates when `reachable` is empty).
Selection select_behavior(const Library& lib, std::string_view property, EnvironmentType env,
                          std::string_view current_config, Rng& rng, const std::set<std::string>& reachable = {});

struct MissionOptions {
  std::optional<std::uint64_t> seed;          // defaults to the scenario seed
  std::optional<std::uint64_t> tick_budget;   // defaults to the scenario budget
  std::optional<FaultProfile> faults;
  int sense_every = 2;
  CharacterizationParams characterization;
  NbvParams nbv;
  NavParams nav;
};

struct MissionSummary {
  bool complete = false;
  std::string failure;  // cause, empty on success
  std::uint64_t ticks = 0;
  int reconfigurations = 0;
  double distance = 0.0;
  std::string final_configuration;
};

struct MissionResult {
  MissionSummary summary;
  std::vector<MissionEvent> events;
  OccupancyGrid grid;
  WorldState world;
  /// Reachable-Unknown fraction sampled each time exploration picked a new view.
  std::vector<double> unknown_fraction;
  /// The same fraction at the moment exploration reported completion.
  std::optional<double> unknown_at_completion;
};

/// Fraction of ground-truth reachable floor columns whose belief is Unknown.
double reachable_unknown_fraction(const WorldState& truth, const OccupancyGrid& belief, double robot_radius);

/// Fully observed belief of a world, as if every voxel had been seen.
OccupancyGrid observed_grid(const WorldState& world);

MissionResult run_mission(const Scenario& scenario, const MissionSpec& spec, const Library& lib,
                          const std::vector<ReconfigurationPlan>& plans, const MissionOptions& options = {});

}  // namespace msrr

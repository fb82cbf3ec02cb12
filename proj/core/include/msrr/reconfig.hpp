#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "msrr/config_graph.hpp"
#include "msrr/library.hpp"
#include "msrr/world.hpp"

namespace msrr {

/// Module ids in plan steps are node ids of the plan's source configuration.
struct DetachStep {
  ModuleId module = 0;
  Face face = Face::Bottom;  // the detaching module's own face
};

/// Waypoints are in the sensor module's frame, meters.
struct MoveStep {
  ModuleId module = 0;
  std::vector<Vec2> waypoints;
};

struct DockStep {
  ModuleId module = 0;
  Face face = Face::Top;
  ModuleId target = 0;
  Face target_face = Face::Top;
};

using PlanStep = std::variant<DetachStep, MoveStep, DockStep>;

struct ReconfigurationPlan {
  std::string name;
  std::string from;
  std::string to;
  std::vector<PlanStep> steps;
};

ReconfigurationPlan parse_plan(std::string_view text);
ReconfigurationPlan load_plan(const std::filesystem::path& path);
/// Every *.json plan in a directory, sorted by file name.
std::vector<ReconfigurationPlan> load_plans(const std::filesystem::path& dir);

const ReconfigurationPlan* find_plan(const std::vector<ReconfigurationPlan>& plans, std::string_view from,
                                     std::string_view to);

enum class PlanErrorKind { TopologyMismatch, FaceConflict, Collision, OutOfZone };
std::string_view to_string(PlanErrorKind k);

struct PlanError {
  PlanErrorKind kind;
  std::string detail;
};

struct ReconfigParams {
  double standoff = 0.10;
  double overdrive = 0.01;
  double align_tol = deg_to_rad(3.0);
  double dock_position_tol = kModuleSize / 2.0;
  double dock_heading_tol = 2.0 * deg_to_rad(3.0);
  double waypoint_tol = 0.015;
  double clearance = kModuleSize;
  double v = 0.08;
  double omega = 1.0;
  double module_budget_s = 60.0;
  PoseNoise noise{0.0, deg_to_rad(1.0)};
};

/// Pose in the sensor frame a module must reach to dock `face` onto
/// `target_face` of a module resting at `target`.
Pose2 dock_pose(const ModuleNode& target, Face target_face, ModuleKind kind, Face face);

/// Replays the plan on the source graph: topology, faces, zone and
/// waypoint-segment clearance against resting modules.
std::optional<PlanError> validate_plan(const ReconfigurationPlan& plan, const Library& lib,
                                       const ReconfigParams& params = {});

enum class ReconfigEventKind { Detached, WaypointReached, Aligned, Docked, VerifyOk };
std::string_view to_string(ReconfigEventKind k);

struct ReconfigEvent {
  ReconfigEventKind kind;
  ModuleId module = 0;  // physical id
  std::uint64_t tick = 0;
};

enum class ReconfigFailureKind { ModuleOutOfZone, DockMisaligned, Timeout, Fault };
std::string_view to_string(ReconfigFailureKind k);

struct ReconfigFailure {
  ReconfigFailureKind kind;
  ModuleId module = 0;
  std::string detail;
  std::optional<FaultCategory> fault;
};

struct ReconfigReport {
  std::vector<ReconfigEvent> events;
  /// Simulated seconds from detach to dock, per moved module, in plan order.
  std::vector<std::pair<ModuleId, double>> module_seconds;
};

using ReconfigOutcome = std::variant<ReconfigReport, ReconfigFailure>;

/// Executes a validated plan in the simulator, one module at a time, under
/// noisy pose feedback. On success the robot adopts the target
/// configuration. Throws Error if the robot is not in the source configuration.
ReconfigOutcome execute_plan(const ReconfigurationPlan& plan, WorldState& world, const Library& lib,
                             const ReconfigParams& params, Rng& rng, FaultInjector* faults = nullptr);

}  // namespace msrr

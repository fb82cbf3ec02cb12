#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "msrr/config_graph.hpp"
#include "msrr/geometry.hpp"
#include "msrr/grid.hpp"
#include "msrr/library.hpp"
#include "msrr/types.hpp"

namespace msrr {

using Rng = std::mt19937_64;

inline constexpr double kTickSeconds = 0.1;
inline constexpr double kWheelRadius = 0.025;
inline constexpr double kTrackWidth = 0.08;
inline constexpr double kJointLimit = kPi / 2.0;

/// Ground-truth voxel content.
struct Voxel {
  bool solid = false;
  Color color = Color::None;
  bool operator==(const Voxel&) const = default;
};

/// Joint vector order: left wheel, right wheel, pan, tilt.
enum Joint : std::size_t { kLeftWheel = 0, kRightWheel = 1, kPan = 2, kTilt = 3 };

struct ModulePose {
  ModuleId id = 0;
  ModuleKind kind = ModuleKind::Body;
  Vec3 position;
  double heading = 0.0;
  std::array<double, 4> joints{};
  bool operator==(const ModulePose&) const = default;
  Pose2 planar() const { return {position.xy(), heading}; }
};

struct TaskObject {
  std::string id;
  Color color = Color::None;
  /// Center of the object's voxel.
  Vec3 position;
  std::optional<ModuleId> carried_by;
  bool operator==(const TaskObject&) const = default;
  double height_above_ground() const { return position.z; }
};

/// A voxelized flight of stairs. Steps rise along `direction`; the last
/// step is the landing on which objects of interest sit.
struct StairFlight {
  Index2 start;        // first cell of the first step (lowest along/lateral index)
  int direction = 0;   // quarter turns: 0 = +x, 1 = +y, 2 = -x, 3 = -y
  int steps = 1;
  int step_depth = 2;  // cells per step, along the direction
  int landing_depth = 2;
  int width = 4;       // cells, lateral
  double rise = kModuleSize;  // true rise per step in meters
  bool operator==(const StairFlight&) const = default;

  Vec2 along() const;
  Vec2 lateral() const;
  /// World point at the middle of the bottom step's leading edge.
  Vec2 base_point(double resolution) const;
  /// Where a climbing robot comes to rest on the landing.
  Vec2 landing_point(double resolution) const;
  double total_depth_cells() const { return (steps - 1) * step_depth + landing_depth; }
  bool on_landing(Vec2 p, double resolution) const;
};

enum class FaultCategory { Hardware, Navigation, Perception, Network };
std::string_view to_string(FaultCategory c);

/// Per-category probability of an injected failure per behavior execution.
struct FaultProfile {
  double hardware = 0.0;
  double navigation = 0.0;
  double perception = 0.0;
  double network = 0.0;
  std::uint64_t seed = 0;
  bool enabled() const { return hardware > 0 || navigation > 0 || perception > 0 || network > 0; }
  double probability(FaultCategory c) const;
  /// Throws Error if a probability lies outside [0, 1].
  void validate() const;
};

/// Draws injected faults; one independent stream per run.
class FaultInjector {
 public:
  explicit FaultInjector(FaultProfile profile) : profile_(profile), rng_(profile.seed) {}
  /// Rolls every category once; returns the first that fires.
  std::optional<FaultCategory> roll();
  const FaultProfile& profile() const { return profile_; }

 private:
  FaultProfile profile_;
  Rng rng_;
};

struct SensorModel {
  double fov_h = deg_to_rad(60.0);
  double fov_v = deg_to_rad(45.0);
  double max_range = 3.0;
  int rays_h = 64;
  int rays_v = 48;
  double mount_height = 0.12;
  double pitch = deg_to_rad(-15.0);
  bool operator==(const SensorModel&) const = default;
};

struct SensorPose {
  Vec3 position;
  double yaw = 0.0;
  double pitch = 0.0;
};

struct RayHit {
  Vec3 direction;
  double range = 0.0;  // distance to the first solid voxel, or max_range
  bool hit = false;
  Color color = Color::None;
};

struct SensorFrame {
  std::vector<RayHit> rays;  // row-major, rays_h per row
  SensorPose pose;
  double fov_h = 0.0;
  double fov_v = 0.0;
  double max_range = 0.0;
};

/// The cluster that carries the sensor module.
struct Robot {
  ModuleId sensor_module = 0;
  std::string configuration;
  Pose2 base;        // sensor module planar pose
  double z = 0.0;    // height of the sensor module's floor contact
  /// Configuration node id -> physical module id.
  std::map<ModuleId, ModuleId> binding;
  /// Physical modules rigidly attached to the cluster.
  std::set<ModuleId> members;
  bool operator==(const Robot&) const = default;
};

struct WorldState {
  Grid3<Voxel> voxels;
  std::vector<TaskObject> objects;
  std::vector<ModulePose> modules;
  std::vector<StairFlight> stairs;
  Robot robot;
  SensorModel sensor;
  std::uint64_t tick = 0;
  std::uint64_t rng_seed = 0;

  const ModulePose* module(ModuleId id) const;
  ModulePose* module(ModuleId id);
  bool operator==(const WorldState&) const = default;
};

class UnknownModule : public Error {
 public:
  explicit UnknownModule(ModuleId id) : Error("unknown module " + std::to_string(id)) {}
};

struct JointVelocities {
  double left_wheel = 0.0;
  double right_wheel = 0.0;
  double pan = 0.0;
  double tilt = 0.0;
};

/// Linear and angular velocity of a rigid body in its own frame.
struct BodyTwist {
  double v = 0.0;
  double omega = 0.0;
};

struct StepCommands {
  /// Per-module joint rates. Wheels of detached modules drive them
  /// differentially; attached modules only move their pan/tilt joints.
  std::map<ModuleId, JointVelocities> modules;
  /// Rigid motion of the whole cluster, realized by its drive wheels.
  std::optional<BodyTwist> cluster;
};

/// Advances the world by dt seconds. Throws UnknownModule.
void step_world(WorldState& state, const StepCommands& commands, double dt);
WorldState stepped(WorldState state, const StepCommands& commands, double dt);

/// Recomputes attached module poses from the robot base and configuration
/// layout, and drags carried objects along with their carriers.
void place_cluster(WorldState& state, const ConfigurationGraph& config);

SensorPose robot_sensor_pose(const WorldState& state);

/// Idealized depth camera: one ray per angular sample, first solid voxel wins.
SensorFrame render_depth(const WorldState& state, const SensorPose& pose);

/// Unit ray direction for sample (column, row) of the sensor's fixed grid.
Vec3 sensor_ray_direction(const SensorModel& model, const SensorPose& pose, int column, int row);

inline constexpr double kZoneDepth = 0.75;
inline constexpr double kZoneWidth = 0.5;

/// True if a point, given in the sensor module's frame, lies in the
/// downward camera's localization zone.
bool in_reconfig_zone(Vec2 local);

struct PoseNoise {
  double position_std = 0.0;
  double heading_std = 0.0;
};

/// Poses of modules inside the sensor module's localization zone, with
/// optional zero-mean Gaussian noise.
std::vector<ModulePose> reconfig_zone_poses(const WorldState& state, ModuleId sensor_module,
                                            const PoseNoise& noise, Rng& rng);

enum class BehaviorFailureReason { EnvMismatch, OutOfReach, NoTarget };
std::string_view to_string(BehaviorFailureReason r);

struct BehaviorFailure {
  BehaviorFailureReason reason;
  std::string detail;
};

/// What an effect behavior acts on, as perceived.
struct BehaviorTarget {
  Vec3 position;
  Color color = Color::None;
};

/// Applies an effect behavior. On failure the state is left untouched.
std::optional<BehaviorFailure> apply_behavior_effect(WorldState& state, const LibraryEntry& entry,
                                                     EnvironmentType env,
                                                     const std::optional<BehaviorTarget>& target);

/// Voxel occupancy including resting (uncarried) task objects.
std::optional<Color> solid_at(const WorldState& state, Index3 cell);

/// Stable text encoding used for determinism checks.
std::string serialize_state(const WorldState& state);

}  // namespace msrr

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msrr/library.hpp"
#include "msrr/world.hpp"

namespace msrr {

/// Axis-aligned block of solid voxels, [min, max) in cell indices.
struct VoxelBox {
  Index3 min;
  Index3 max;
  Color color = Color::Gray;
};

struct ObjectSpec {
  std::string id;
  Color color = Color::None;
  Index3 cell;
};

struct MissionLimits {
  std::uint64_t tick_budget = 30000;
  /// Require a configuration that can drive once the mission formula holds.
  bool end_drive_capable = false;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  GridShape shape;
  std::vector<VoxelBox> boxes;
  std::vector<StairFlight> stairs;
  Color stair_color = Color::Gray;
  std::vector<ObjectSpec> objects;
  std::string start_configuration = "Car";
  Vec2 start_position;
  double start_heading = 0.0;
  std::optional<std::string> carrying;
  FaultProfile faults;
  PoseNoise noise{0.0, deg_to_rad(1.0)};
  MissionLimits mission;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Voxelizes the scenario and places the starting cluster. Throws Error
/// when the start configuration is missing or geometry leaves the grid.
WorldState make_world(const Scenario& scenario, const Library& library);

/// Solid voxels of a flight, as cells.
std::vector<Index3> stair_cells(const StairFlight& flight, double resolution);

}  // namespace msrr

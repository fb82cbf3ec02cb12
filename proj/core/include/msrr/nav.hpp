#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msrr/geometry.hpp"
#include "msrr/grid.hpp"
#include "msrr/mapping.hpp"

namespace msrr {

struct Waypoint {
  Vec2 position;
  std::optional<double> heading;
};

struct DriveCommand {
  double v = 0.0;
  double omega = 0.0;
};

struct NavParams {
  double v_max = 0.15;
  double omega_max = 1.0;
  double lookahead = 0.16;
  double arrival_tol = 0.04;
  double heading_tol = deg_to_rad(3.0);
  double rotate_in_place = deg_to_rad(60.0);
};

struct Unreachable {
  std::string reason;
};

using Path = std::vector<Waypoint>;
using PathResult = std::variant<Path, Unreachable>;

/// Cell-level A* over a traversability mask. The start only needs to be
/// inside the mask's bounds; the goal must be traversable. Returns the
/// cell sequence including both ends, or nothing.
std::optional<std::vector<Index2>> astar_cells(const Grid2<std::uint8_t>& traversable, Index2 start, Index2 goal);

/// Length of a cell path in cells (1 per straight step, sqrt 2 per diagonal).
double cell_path_cost(const std::vector<Index2>& cells);

/// Plans on the belief map: slab projection, bloating by robot_radius,
/// Unknown blocked. The start column must be Free.
PathResult plan_path(const OccupancyGrid& grid, Vec2 start, const Waypoint& goal, double robot_radius);

/// Pure-pursuit command toward the path.
DriveCommand follow_path(const Path& path, const Pose2& pose, const NavParams& params = {});

/// True when within arrival_tol of the last waypoint and aligned with its heading, if any.
bool path_done(const Path& path, const Pose2& pose, const NavParams& params = {});

/// (left, right) wheel rates in rad/s.
std::pair<double, double> to_wheel_speeds(const DriveCommand& cmd, double track_width, double wheel_radius);

}  // namespace msrr

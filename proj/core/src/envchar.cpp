#include "msrr/envchar.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace msrr {
namespace {

struct Reachability {
  Grid2<CellState> slab;
  Grid2<std::uint8_t> reachable;
};

Reachability reachability(const OccupancyGrid& grid, const Pose2& robot_pose, double robot_radius) {
  const GridShape& shape = grid.shape();
  Reachability r{project_slab(grid), {}};
  r.reachable = traversable_columns(r.slab, shape.resolution, robot_radius);
  const Index2 start = shape.column_of(robot_pose.position);
  if (!shape.contains(start) || r.slab[start] != CellState::Free) return r;
  auto trav = r.reachable;
  trav[start] = 1;
  const auto dist = path_distances(trav, start, shape.resolution);
  for (int y = 0; y < shape.ny; ++y)
    for (int x = 0; x < shape.nx; ++x)
      if (dist[{x, y}] == kUnreachable) r.reachable[{x, y}] = 0;
  return r;
}

}  // namespace

void CharacterizationParams::validate() const {
  if (!(robot_radius > 0.0 && cone_half_angle > 0.0 && dist_threshold > 0.0 && high_threshold > 0.0 &&
        region_extent > 0.0))
    throw Error("characterization parameters must be strictly positive");
  if (!(cone_half_angle < kPi / 2.0)) throw Error("cone half-angle must be below 90 degrees");
}

Characterization characterize(const OccupancyGrid& grid, const DetectedObject& object, const Pose2& robot_pose,
                              const CharacterizationParams& params) {
  params.validate();
  const GridShape& shape = grid.shape();
  const auto r = reachability(grid, robot_pose, params.robot_radius);

  const Vec2 obj = object.centroid.xy();
  const Vec2 to_robot = robot_pose.position - obj;
  const double reference = std::atan2(to_robot.y, to_robot.x);
  constexpr double kEps = 1e-9;

  struct Best {
    Index2 cell;
    double d;
    double diff;
  };
  std::optional<Best> best;
  const auto better = [&](const Best& a, const Best& b) {
    if (std::fabs(a.d - b.d) > kEps) return a.d < b.d;
    if (std::fabs(std::fabs(a.diff) - std::fabs(b.diff)) > kEps) return std::fabs(a.diff) < std::fabs(b.diff);
    // Mirror-image ties: prefer the counter-clockwise side.
    if ((a.diff > kEps) != (b.diff > kEps)) return a.diff > kEps;
    return a.cell < b.cell;
  };

  for (int y = 0; y < shape.ny; ++y)
    for (int x = 0; x < shape.nx; ++x) {
      const Index2 c{x, y};
      if (!r.reachable[c]) continue;
      const Vec2 p = shape.center(c);
      const double d = distance(p, obj);
      if (d > params.region_extent || d < kEps) continue;
      const Vec2 v = p - obj;
      const double diff = wrap_angle(std::atan2(v.y, v.x) - reference);
      if (std::fabs(diff) > params.cone_half_angle + kEps) continue;
      const Best cand{c, d, diff};
      if (!best || better(cand, *best)) best = cand;
    }
  if (!best) throw NoReachablePoint();

  Characterization out;
  out.staging_cell = best->cell;
  out.closest_reachable_distance = best->d;
  const Vec2 q = shape.center(best->cell);
  const Vec2 facing = obj - q;
  out.staging_waypoint = {q, std::atan2(facing.y, facing.x)};
  const bool on_ground = object.height_above_ground < params.high_threshold / 2.0;
  if (best->d > params.dist_threshold + kEps)
    out.env_type = on_ground ? EnvironmentType::Tunnel : EnvironmentType::Stairs;
  else if (object.height_above_ground >= params.high_threshold - kEps)
    out.env_type = EnvironmentType::High;
  else
    out.env_type = EnvironmentType::Free;
  return out;
}

std::string characterization_debug(const OccupancyGrid& grid, const DetectedObject& object,
                                   const Characterization& result, const CharacterizationParams& params) {
  const GridShape& shape = grid.shape();
  const auto slab = project_slab(grid);
  const auto trav = traversable_columns(slab, shape.resolution, params.robot_radius);
  const Vec2 obj = object.centroid.xy();
  const Index2 oc = shape.column_of(obj);
  const int reach = static_cast<int>(std::ceil(params.region_extent / shape.resolution));
  std::ostringstream out;
  out << "env " << to_string(result.env_type) << " d " << result.closest_reachable_distance << '\n';
  for (int y = std::min(shape.ny - 1, oc.y + reach); y >= std::max(0, oc.y - reach); --y) {
    for (int x = std::max(0, oc.x - reach); x <= std::min(shape.nx - 1, oc.x + reach); ++x) {
      const Index2 c{x, y};
      char ch = '?';
      if (c == result.staging_cell)
        ch = 'Q';
      else if (c == oc)
        ch = 'o';
      else if (slab[c] == CellState::Occupied)
        ch = '#';
      else if (slab[c] == CellState::Free)
        ch = trav[c] ? '.' : 'x';
      out << ch;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace msrr

#include "msrr/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

namespace msrr {

std::string_view to_string(CellState s) {
  switch (s) {
    case CellState::Unknown: return "unknown";
    case CellState::Free: return "free";
    case CellState::Occupied: return "occupied";
  }
  return "unknown";
}

void OccupancyGrid::mark_free(Index3 c) {
  MapCell& cell = cells_[c];
  if (cell.state != CellState::Occupied) cell.state = CellState::Free;
}

void OccupancyGrid::mark_occupied(Index3 c, Color color) {
  MapCell& cell = cells_[c];
  if (cell.state == CellState::Occupied && cell.color != Color::None) return;
  cell = {CellState::Occupied, color};
}

void OccupancyGrid::clear(Index3 c) { cells_[c] = {CellState::Free, Color::None}; }

std::size_t OccupancyGrid::count(CellState s) const {
  return static_cast<std::size_t>(
      std::count_if(cells_.data().begin(), cells_.data().end(), [&](const MapCell& c) { return c.state == s; }));
}

void integrate_frame(OccupancyGrid& grid, const SensorFrame& frame) {
  const GridShape& shape = grid.shape();
  for (const auto& ray : frame.rays) {
    const double max_t = ray.hit ? frame.max_range : ray.range;
    traverse_voxels(shape, frame.pose.position, ray.direction, max_t, [&](Index3 cell, double t_enter, double) {
      if (ray.hit && t_enter >= ray.range) {
        grid.mark_occupied(cell, ray.color);
        return false;
      }
      grid.mark_free(cell);
      return true;
    });
  }
}

OccupancyGrid integrated(OccupancyGrid grid, const SensorFrame& frame) {
  integrate_frame(grid, frame);
  return grid;
}

void mark_free_disc(OccupancyGrid& grid, Vec2 center, double radius, int layers) {
  const GridShape& shape = grid.shape();
  const Index2 c = shape.column_of(center);
  const int reach = static_cast<int>(std::ceil(radius / shape.resolution)) + 1;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx) {
      const Index2 col{c.x + dx, c.y + dy};
      if (!shape.contains(col) || distance(shape.center(col), center) > radius) continue;
      for (int z = 0; z < std::min(layers, shape.nz); ++z) grid.mark_free({col.x, col.y, z});
    }
}

std::vector<DetectedObject> detect_objects(const OccupancyGrid& grid, const std::set<Color>& colors) {
  const GridShape& shape = grid.shape();
  std::vector<char> seen(shape.cell_count(), 0);
  std::map<Color, std::vector<DetectedObject>> by_color;
  const std::array<Index3, 6> steps{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  for (std::size_t i = 0; i < shape.cell_count(); ++i) {
    const Index3 start = shape.unlinear(i);
    const MapCell& cell = grid[start];
    if (seen[i] || cell.state != CellState::Occupied || !colors.count(cell.color)) continue;
    DetectedObject obj;
    obj.color = cell.color;
    std::queue<Index3> open;
    open.push(start);
    seen[i] = 1;
    while (!open.empty()) {
      const Index3 c = open.front();
      open.pop();
      obj.support.push_back(c);
      for (const auto& d : steps) {
        const Index3 n{c.x + d.x, c.y + d.y, c.z + d.z};
        if (!shape.contains(n) || seen[shape.linear(n)]) continue;
        const MapCell& nc = grid[n];
        if (nc.state != CellState::Occupied || nc.color != obj.color) continue;
        seen[shape.linear(n)] = 1;
        open.push(n);
      }
    }
    std::sort(obj.support.begin(), obj.support.end(),
              [&](Index3 a, Index3 b) { return shape.linear(a) < shape.linear(b); });
    Vec3 sum;
    for (const auto& c : obj.support) sum = sum + shape.center(c);
    obj.centroid = sum * (1.0 / static_cast<double>(obj.support.size()));
    obj.height_above_ground = obj.centroid.z;
    by_color[obj.color].push_back(std::move(obj));
  }
  std::vector<DetectedObject> out;
  for (auto& [_, objs] : by_color)
    for (auto& o : objs) out.push_back(std::move(o));
  return out;
}

Grid2<CellState> project_slab(const OccupancyGrid& grid, int layers) {
  const GridShape& shape = grid.shape();
  Grid2<CellState> out(shape.nx, shape.ny, CellState::Unknown);
  const int top = std::min(layers, shape.nz);
  for (int y = 0; y < shape.ny; ++y)
    for (int x = 0; x < shape.nx; ++x) {
      bool occupied = false;
      for (int z = 0; z < top; ++z) occupied = occupied || grid.state({x, y, z}) == CellState::Occupied;
      if (occupied)
        out[{x, y}] = CellState::Occupied;
      else if (grid.state({x, y, 0}) == CellState::Free)
        out[{x, y}] = CellState::Free;
    }
  return out;
}

Grid2<std::uint8_t> traversable_columns(const Grid2<CellState>& slab, double resolution, double robot_radius) {
  Grid2<std::uint8_t> out(slab.nx(), slab.ny(), 0);
  const double r = robot_radius / resolution;
  const double r2 = r * r - 1e-9;
  const int reach = static_cast<int>(std::ceil(r));
  for (int y = 0; y < slab.ny(); ++y)
    for (int x = 0; x < slab.nx(); ++x) {
      if (slab[{x, y}] != CellState::Free) continue;
      bool clear = true;
      for (int dy = -reach; dy <= reach && clear; ++dy)
        for (int dx = -reach; dx <= reach && clear; ++dx) {
          const Index2 n{x + dx, y + dy};
          if (slab.contains(n) && slab[n] == CellState::Occupied && dx * dx + dy * dy < r2) clear = false;
        }
      out[{x, y}] = clear;
    }
  return out;
}

Grid2<double> path_distances(const Grid2<std::uint8_t>& traversable, Index2 start, double resolution) {
  Grid2<double> dist(traversable.nx(), traversable.ny(), kUnreachable);
  if (!traversable.contains(start)) return dist;
  using Item = std::pair<double, std::pair<int, int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[start] = 0.0;
  open.push({0.0, {start.y, start.x}});
  const auto ok = [&](Index2 c) { return traversable.contains(c) && traversable[c]; };
  while (!open.empty()) {
    const auto [d, yx] = open.top();
    open.pop();
    const Index2 c{yx.second, yx.first};
    if (d > dist[c]) continue;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Index2 n{c.x + dx, c.y + dy};
        if (!ok(n)) continue;
        if (dx != 0 && dy != 0 && (!ok({c.x + dx, c.y}) || !ok({c.x, c.y + dy}))) continue;
        const double nd = d + resolution * ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
        if (nd < dist[n]) {
          dist[n] = nd;
          open.push({nd, {n.y, n.x}});
        }
      }
  }
  return dist;
}

int view_gain(const OccupancyGrid& grid, const SensorModel& sensor, const SensorPose& pose, int ray_stride) {
  const GridShape& shape = grid.shape();
  std::vector<Index3> counted;
  const int stride = std::max(1, ray_stride);
  for (int row = stride / 2; row < sensor.rays_v; row += stride)
    for (int col = stride / 2; col < sensor.rays_h; col += stride) {
      const Vec3 dir = sensor_ray_direction(sensor, pose, col, row);
      traverse_voxels(shape, pose.position, dir, sensor.max_range, [&](Index3 cell, double, double) {
        const CellState s = grid.state(cell);
        if (s == CellState::Occupied) return false;
        if (s == CellState::Unknown) counted.push_back(cell);
        return true;
      });
    }
  std::sort(counted.begin(), counted.end());
  return static_cast<int>(std::unique(counted.begin(), counted.end()) - counted.begin());
}

std::vector<ViewCandidate> view_candidates(const OccupancyGrid& grid, const SensorModel& sensor, double robot_radius,
                                           const Pose2& current, const NbvParams& params,
                                           const std::set<CandidateKey>& excluded) {
  const GridShape& shape = grid.shape();
  const auto slab = project_slab(grid);
  auto trav = traversable_columns(slab, shape.resolution, robot_radius);
  const Index2 start = shape.column_of(current.position);
  const bool start_ok = trav.contains(start) && slab[start] == CellState::Free;
  if (!start_ok) throw NoReachableCandidate();
  const bool start_traversable = trav[start];
  trav[start] = 1;
  const auto dist = path_distances(trav, start, shape.resolution);
  trav[start] = start_traversable;

  std::vector<ViewCandidate> out;
  const int spacing = std::max(1, params.spacing_cells);
  for (int y = 0; y < shape.ny; y += spacing)
    for (int x = 0; x < shape.nx; x += spacing) {
      const Index2 c{x, y};
      if (!trav[c] || dist[c] == kUnreachable) continue;
      for (int h = 0; h < params.headings; ++h) {
        if (excluded.count({c, h})) continue;
        ViewCandidate v;
        v.cell = c;
        v.heading_index = h;
        v.pose = {shape.center(c), wrap_angle(2.0 * kPi * h / params.headings)};
        const SensorPose sp{{v.pose.position.x, v.pose.position.y, sensor.mount_height}, v.pose.heading, sensor.pitch};
        v.gain = view_gain(grid, sensor, sp, params.ray_stride);
        v.path_distance = dist[c];
        out.push_back(v);
      }
    }
  return out;
}

std::variant<ViewCandidate, ExplorationComplete> next_best_view(const OccupancyGrid& grid, const SensorModel& sensor,
                                                                double robot_radius, const Pose2& current,
                                                                const NbvParams& params,
                                                                const std::set<CandidateKey>& excluded) {
  const auto candidates = view_candidates(grid, sensor, robot_radius, current, params, excluded);
  if (candidates.empty()) return ExplorationComplete{0};
  const ViewCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.gain != best->gain) {
      if (c.gain > best->gain) best = &c;
      continue;
    }
    if (std::fabs(c.path_distance - best->path_distance) > 1e-9) {
      if (c.path_distance < best->path_distance) best = &c;
      continue;
    }
    // Candidates are generated in (y, x, heading) order; lexicographic order is (x, y, heading).
    if (std::tie(c.cell.x, c.cell.y, c.heading_index) < std::tie(best->cell.x, best->cell.y, best->heading_index))
      best = &c;
  }
  if (best->gain < params.gain_min) return ExplorationComplete{best->gain};
  return *best;
}

std::string dump_map(const OccupancyGrid& grid) {
  std::ostringstream out;
  const GridShape& shape = grid.shape();
  for (std::size_t i = 0; i < shape.cell_count(); ++i) {
    const MapCell& c = grid.data()[i];
    if (c.state == CellState::Unknown) continue;
    const Index3 idx = shape.unlinear(i);
    out << idx.x << ' ' << idx.y << ' ' << idx.z << ' ' << to_string(c.state) << ' ' << to_string(c.color) << '\n';
  }
  return out.str();
}

}  // namespace msrr

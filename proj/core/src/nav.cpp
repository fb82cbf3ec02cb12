#include "msrr/nav.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <tuple>

namespace msrr {

std::optional<std::vector<Index2>> astar_cells(const Grid2<std::uint8_t>& trav, Index2 start, Index2 goal) {
  if (!trav.contains(start) || !trav.contains(goal) || !trav[goal]) return std::nullopt;
  const int nx = trav.nx();
  const auto id = [&](Index2 c) { return static_cast<std::size_t>(c.y) * nx + c.x; };
  const auto h = [&](Index2 c) {
    const double dx = std::abs(c.x - goal.x);
    const double dy = std::abs(c.y - goal.y);
    return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
  };
  const auto ok = [&](Index2 c) { return trav.contains(c) && trav[c]; };
  const std::size_t n = static_cast<std::size_t>(nx) * trav.ny();
  std::vector<double> g(n, kUnreachable);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  using Item = std::tuple<double, double, std::size_t>;  // f, -g, cell
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[id(start)] = 0.0;
  open.push({h(start), 0.0, id(start)});
  while (!open.empty()) {
    const auto [f, neg_g, cid] = open.top();
    open.pop();
    if (closed[cid]) continue;
    closed[cid] = 1;
    const Index2 c{static_cast<int>(cid % nx), static_cast<int>(cid / nx)};
    if (c == goal) break;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Index2 nb{c.x + dx, c.y + dy};
        if (!ok(nb)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && (!ok({c.x + dx, c.y}) || !ok({c.x, c.y + dy}))) continue;
        const double ng = g[cid] + (diag ? std::sqrt(2.0) : 1.0);
        if (ng + 1e-12 < g[id(nb)]) {
          g[id(nb)] = ng;
          parent[id(nb)] = cid;
          open.push({ng + h(nb), -ng, id(nb)});
        }
      }
  }
  if (g[id(goal)] == kUnreachable) return std::nullopt;
  std::vector<Index2> cells;
  for (std::size_t cur = id(goal); cur != n; cur = parent[cur]) {
    cells.push_back({static_cast<int>(cur % nx), static_cast<int>(cur / nx)});
    if (cur == id(start)) break;
  }
  std::reverse(cells.begin(), cells.end());
  return cells;
}

double cell_path_cost(const std::vector<Index2>& cells) {
  double cost = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const bool diag = cells[i].x != cells[i - 1].x && cells[i].y != cells[i - 1].y;
    cost += diag ? std::sqrt(2.0) : 1.0;
  }
  return cost;
}

PathResult plan_path(const OccupancyGrid& grid, Vec2 start, const Waypoint& goal, double robot_radius) {
  const GridShape& shape = grid.shape();
  const auto slab = project_slab(grid);
  const auto trav = traversable_columns(slab, shape.resolution, robot_radius);
  const Index2 s = shape.column_of(start);
  const Index2 g = shape.column_of(goal.position);
  if (!shape.contains(s) || slab[s] != CellState::Free) return Unreachable{"start is not on a free cell"};
  if (!shape.contains(g) || !trav[g]) return Unreachable{"goal is blocked or within the robot radius of an obstacle"};
  auto cells = astar_cells(trav, s, g);
  if (!cells) return Unreachable{"no collision-free path to the goal"};
  Path path;
  for (std::size_t i = 1; i + 1 < cells->size(); ++i) path.push_back({shape.center((*cells)[i]), std::nullopt});
  path.push_back(goal);
  return path;
}

namespace {

// Projects p onto the waypoint polyline and walks `lookahead` further along it.
Vec2 lookahead_point(const std::vector<Vec2>& pts, Vec2 p, double lookahead) {
  if (pts.size() == 1) return pts.front();
  std::size_t best_seg = 0;
  double best_t = 0.0;
  double best_d = kUnreachable;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 ab = pts[i + 1] - pts[i];
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = len2 > 0 ? ((p.x - pts[i].x) * ab.x + (p.y - pts[i].y) * ab.y) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double d = distance(p, pts[i] + ab * t);
    if (d < best_d - 1e-12) {
      best_d = d;
      best_seg = i;
      best_t = t;
    }
  }
  Vec2 cur = pts[best_seg] + (pts[best_seg + 1] - pts[best_seg]) * best_t;
  // Far off the path: head for the projection first.
  if (best_d >= lookahead) return cur;
  double left = std::sqrt(lookahead * lookahead - best_d * best_d);
  for (std::size_t i = best_seg; i + 1 < pts.size(); ++i) {
    const double seg = distance(cur, pts[i + 1]);
    if (seg >= left) return cur + (pts[i + 1] - cur) * (left / seg);
    left -= seg;
    cur = pts[i + 1];
  }
  return pts.back();
}

}  // namespace

bool path_done(const Path& path, const Pose2& pose, const NavParams& params) {
  if (path.empty()) return true;
  const Waypoint& last = path.back();
  if (distance(pose.position, last.position) > params.arrival_tol) return false;
  return !last.heading || std::fabs(wrap_angle(*last.heading - pose.heading)) <= params.heading_tol;
}

DriveCommand follow_path(const Path& path, const Pose2& pose, const NavParams& params) {
  if (path.empty()) return {};
  const Waypoint& last = path.back();
  const double to_goal = distance(pose.position, last.position);
  if (to_goal <= params.arrival_tol) {
    if (!last.heading) return {};
    const double err = wrap_angle(*last.heading - pose.heading);
    if (std::fabs(err) <= params.heading_tol) return {};
    return {0.0, std::clamp(2.0 * err, -params.omega_max, params.omega_max)};
  }

  std::vector<Vec2> pts;
  for (const auto& w : path) pts.push_back(w.position);
  const Vec2 target = lookahead_point(pts, pose.position, params.lookahead);
  const Vec2 d = target - pose.position;
  const double ld = d.norm();
  if (ld < 1e-9) return {};
  const double alpha = wrap_angle(std::atan2(d.y, d.x) - pose.heading);
  if (std::fabs(alpha) > params.rotate_in_place)
    return {0.0, alpha > 0 ? params.omega_max : -params.omega_max};

  double v = params.v_max * std::clamp(to_goal / (2.0 * params.lookahead), 0.15, 1.0);
  double omega = v * 2.0 * std::sin(alpha) / ld;
  if (std::fabs(omega) > params.omega_max) {
    v *= params.omega_max / std::fabs(omega);
    omega = omega > 0 ? params.omega_max : -params.omega_max;
  }
  return {v, omega};
}

std::pair<double, double> to_wheel_speeds(const DriveCommand& cmd, double track_width, double wheel_radius) {
  return {(cmd.v - cmd.omega * track_width / 2.0) / wheel_radius, (cmd.v + cmd.omega * track_width / 2.0) / wheel_radius};
}

}  // namespace msrr

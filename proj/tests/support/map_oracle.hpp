#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "msrr/mapping.hpp"
#include "msrr/world.hpp"

namespace oracle {

using namespace msrr;

// Cells pierced by a ray with positive length, ordered by entry distance.
// The half-open cell holding the origin always comes first.
inline std::vector<Index3> pierced(const GridShape& shape, Vec3 o, Vec3 d, double max_t) {
  std::vector<std::pair<double, Index3>> hits;
  for (int x = 0; x < shape.nx; ++x)
    for (int y = 0; y < shape.ny; ++y)
      for (int z = 0; z < shape.nz; ++z) {
        const Vec3 lo = shape.center(Index3{x, y, z}) - Vec3{0.04, 0.04, 0.04};
        const double l[3] = {lo.x, lo.y, lo.z};
        const double oa[3] = {o.x, o.y, o.z};
        const double da[3] = {d.x, d.y, d.z};
        double t0 = 0.0;
        double t1 = max_t;
        for (int a = 0; a < 3; ++a) {
          if (std::fabs(da[a]) < 1e-12) {
            if (oa[a] < l[a] || oa[a] >= l[a] + 0.08) t1 = -1.0;
            continue;
          }
          double ta = (l[a] - oa[a]) / da[a];
          double tb = (l[a] + 0.08 - oa[a]) / da[a];
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
        if (t1 - t0 > 1e-7) hits.push_back({t0, {x, y, z}});
      }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Index3> out;
  if (shape.contains(shape.cell_of(o))) out.push_back(shape.cell_of(o));
  for (const auto& [_, c] : hits)
    if (out.empty() || c != out.front()) out.push_back(c);
  return out;
}

inline int view_gain(const OccupancyGrid& g, const SensorModel& m, const SensorPose& p, int stride) {
  std::set<Index3> seen;
  for (int row = stride / 2; row < m.rays_v; row += stride)
    for (int col = stride / 2; col < m.rays_h; col += stride)
      for (const Index3 c : pierced(g.shape(), p.position, sensor_ray_direction(m, p, col, row), m.max_range)) {
        if (g.state(c) == CellState::Occupied) break;
        if (g.state(c) == CellState::Unknown) seen.insert(c);
      }
  return static_cast<int>(seen.size());
}

// Bellman-Ford relaxation to a fixed point over the same move set.
inline Grid2<double> bellman_ford(const Grid2<std::uint8_t>& t, Index2 s, double res) {
  Grid2<double> d(t.nx(), t.ny(), kUnreachable);
  if (!t.contains(s)) return d;
  d[s] = 0.0;
  const auto ok = [&](int x, int y) { return t.contains(Index2{x, y}) && t[{x, y}]; };
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < t.ny(); ++y)
      for (int x = 0; x < t.nx(); ++x) {
        if (d[{x, y}] == kUnreachable) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || !ok(x + dx, y + dy)) continue;
            const bool diag = dx != 0 && dy != 0;
            if (diag && (!ok(x + dx, y) || !ok(x, y + dy))) continue;
            const double nd = d[{x, y}] + res * (diag ? std::sqrt(2.0) : 1.0);
            if (nd < d[{x + dx, y + dy}] - 1e-12) {
              d[{x + dx, y + dy}] = nd;
              changed = true;
            }
          }
      }
  }
  return d;
}

// Textbook O(V^2) Dijkstra: linear scan for the closest open vertex.
inline double dijkstra_cost(const Grid2<std::uint8_t>& t, Index2 s, Index2 g) {
  const int n = t.nx() * t.ny();
  std::vector<double> d(n, kUnreachable);
  std::vector<char> done(n, 0);
  const auto at = [&](int x, int y) { return y * t.nx() + x; };
  const auto ok = [&](int x, int y) { return x >= 0 && y >= 0 && x < t.nx() && y < t.ny() && t[{x, y}]; };
  d[at(s.x, s.y)] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int k = 0; k < n; ++k)
      if (!done[k] && d[k] < kUnreachable && (u < 0 || d[k] < d[u])) u = k;
    if (u < 0) break;
    done[u] = 1;
    const int ux = u % t.nx();
    const int uy = u / t.nx();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || !ok(ux + dx, uy + dy)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && (!ok(ux + dx, uy) || !ok(ux, uy + dy))) continue;
        const int v = at(ux + dx, uy + dy);
        d[v] = std::min(d[v], d[u] + (diag ? std::sqrt(2.0) : 1.0));
      }
  }
  return d[at(g.x, g.y)];
}

struct BestView {
  bool any = false;
  int gain = -1;
  double path_distance = 0.0;
  Index2 cell;
  int heading = 0;
};

// Exhaustive candidate scan: larger gain, shorter path, then (x, y, heading).
inline BestView best_view(const OccupancyGrid& g, const SensorModel& m, double radius, const Pose2& here,
                          const NbvParams& params) {
  auto trav = traversable_columns(project_slab(g), g.shape().resolution, radius);
  const Index2 start = g.shape().column_of(here.position);
  trav[start] = 1;
  const auto dist = bellman_ford(trav, start, g.shape().resolution);
  trav = traversable_columns(project_slab(g), g.shape().resolution, radius);
  BestView best;
  for (int y = 0; y < g.shape().ny; y += params.spacing_cells)
    for (int x = 0; x < g.shape().nx; x += params.spacing_cells) {
      if (!trav[{x, y}] || dist[{x, y}] == kUnreachable) continue;
      for (int h = 0; h < params.headings; ++h) {
        const Vec2 c = g.shape().center(Index2{x, y});
        const SensorPose pose{{c.x, c.y, m.mount_height}, wrap_angle(2.0 * kPi * h / params.headings), m.pitch};
        const int gain = oracle::view_gain(g, m, pose, params.ray_stride);
        const double d = dist[{x, y}];
        bool better = !best.any || gain > best.gain;
        if (best.any && gain == best.gain) {
          if (std::fabs(d - best.path_distance) > 1e-9)
            better = d < best.path_distance;
          else
            better = std::make_tuple(x, y, h) < std::make_tuple(best.cell.x, best.cell.y, best.heading);
        }
        if (better) best = {true, gain, d, {x, y}, h};
      }
    }
  return best;
}

}  // namespace oracle

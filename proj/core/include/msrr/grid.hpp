#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "msrr/geometry.hpp"

namespace msrr {

struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;
  constexpr auto operator<=>(const Index3&) const = default;
};

struct Index2 {
  int x = 0;
  int y = 0;
  constexpr auto operator<=>(const Index2&) const = default;
};

/// Dimensions and placement of a regular voxel lattice. Cell (i,j,k) spans
/// [origin + i*res, origin + (i+1)*res) on each axis.
struct GridShape {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  double resolution = 0.08;
  Vec3 origin;

  constexpr bool operator==(const GridShape&) const = default;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  bool contains(Index3 c) const {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < nx && c.y < ny && c.z < nz;
  }
  bool contains(Index2 c) const { return c.x >= 0 && c.y >= 0 && c.x < nx && c.y < ny; }
  bool contains(Vec3 p) const { return contains(cell_of(p)); }

  Index3 cell_of(Vec3 p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
            static_cast<int>(std::floor((p.y - origin.y) / resolution)),
            static_cast<int>(std::floor((p.z - origin.z) / resolution))};
  }
  Index2 column_of(Vec2 p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
            static_cast<int>(std::floor((p.y - origin.y) / resolution))};
  }
  Vec3 center(Index3 c) const {
    return {origin.x + (c.x + 0.5) * resolution, origin.y + (c.y + 0.5) * resolution,
            origin.z + (c.z + 0.5) * resolution};
  }
  Vec2 center(Index2 c) const {
    return {origin.x + (c.x + 0.5) * resolution, origin.y + (c.y + 0.5) * resolution};
  }
  std::size_t linear(Index3 c) const {
    return (static_cast<std::size_t>(c.z) * ny + c.y) * nx + c.x;
  }
  Index3 unlinear(std::size_t i) const {
    const int x = static_cast<int>(i % nx);
    const int y = static_cast<int>((i / nx) % ny);
    const int z = static_cast<int>(i / (static_cast<std::size_t>(nx) * ny));
    return {x, y, z};
  }
};

/// Dense 3D array over a GridShape.
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(GridShape shape, T fill) : shape_(shape), cells_(shape.cell_count(), fill) {}

  const GridShape& shape() const { return shape_; }
  const T& operator[](Index3 c) const { return cells_[shape_.linear(c)]; }
  T& operator[](Index3 c) { return cells_[shape_.linear(c)]; }
  const T& at(Index3 c) const {
    if (!shape_.contains(c)) throw std::out_of_range("grid index out of range");
    return cells_[shape_.linear(c)];
  }
  const std::vector<T>& data() const { return cells_; }
  std::vector<T>& data() { return cells_; }

  bool operator==(const Grid3&) const = default;

 private:
  GridShape shape_;
  std::vector<T> cells_;
};

/// Dense 2D array; shares the x/y part of a GridShape.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int nx, int ny, T fill) : nx_(nx), ny_(ny), cells_(static_cast<std::size_t>(nx) * ny, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  bool contains(Index2 c) const { return c.x >= 0 && c.y >= 0 && c.x < nx_ && c.y < ny_; }
  const T& operator[](Index2 c) const { return cells_[static_cast<std::size_t>(c.y) * nx_ + c.x]; }
  T& operator[](Index2 c) { return cells_[static_cast<std::size_t>(c.y) * nx_ + c.x]; }
  bool operator==(const Grid2&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> cells_;
};

/// Amanatides-Woo traversal of the cells pierced by the ray origin + t*dir,
/// t in [0, max_t]. `visit(cell, t_enter, t_exit)` returns false to stop.
/// Traversal ends when the ray leaves the lattice. `dir` must be unit length.
template <typename Visitor>
void traverse_voxels(const GridShape& shape, Vec3 origin, Vec3 dir, double max_t, Visitor&& visit) {
  Index3 cell = shape.cell_of(origin);
  if (!shape.contains(cell)) return;
  const double res = shape.resolution;
  const double inf = std::numeric_limits<double>::infinity();
  const std::array<double, 3> o{origin.x - shape.origin.x, origin.y - shape.origin.y,
                                origin.z - shape.origin.z};
  const std::array<double, 3> d{dir.x, dir.y, dir.z};
  std::array<int, 3> idx{cell.x, cell.y, cell.z};
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = ((idx[a] + 1) * res - o[a]) / d[a];
      t_delta[a] = res / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (idx[a] * res - o[a]) / d[a];
      t_delta[a] = -res / d[a];
    } else {
      step[a] = 0;
      t_max[a] = inf;
      t_delta[a] = inf;
    }
  }
  double t_enter = 0.0;
  const std::array<int, 3> limits{shape.nx, shape.ny, shape.nz};
  while (true) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    const double t_exit = std::fmin(t_max[axis], max_t);
    if (!visit(Index3{idx[0], idx[1], idx[2]}, t_enter, t_exit)) return;
    if (t_max[axis] >= max_t) return;
    t_enter = t_max[axis];
    idx[axis] += step[axis];
    if (idx[axis] < 0 || idx[axis] >= limits[axis]) return;
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace msrr

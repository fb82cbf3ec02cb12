#pragma once

#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msrr/grid.hpp"
#include "msrr/types.hpp"
#include "msrr/world.hpp"

namespace msrr {

enum class CellState : std::uint8_t { Unknown, Free, Occupied };
std::string_view to_string(CellState s);

struct MapCell {
  CellState state = CellState::Unknown;
  Color color = Color::None;
  bool operator==(const MapCell&) const = default;
};

/// Tri-state voxel belief. Occupied is sticky.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridShape shape) : cells_(shape, MapCell{}) {}

  const GridShape& shape() const { return cells_.shape(); }
  const MapCell& operator[](Index3 c) const { return cells_[c]; }
  CellState state(Index3 c) const { return cells_[c].state; }

  /// Ignored if the cell is already Occupied.
  void mark_free(Index3 c);
  void mark_occupied(Index3 c, Color color);
  /// Forces a cell to Free regardless of its state, for cells the robot
  /// itself has just emptied (a picked-up object).
  void clear(Index3 c);

  std::size_t count(CellState s) const;
  const std::vector<MapCell>& data() const { return cells_.data(); }
  bool operator==(const OccupancyGrid&) const = default;

 private:
  Grid3<MapCell> cells_;
};

void integrate_frame(OccupancyGrid& grid, const SensorFrame& frame);
OccupancyGrid integrated(OccupancyGrid grid, const SensorFrame& frame);

/// Marks the disc of floor columns under the robot Free in the lowest
/// `layers` layers (cells the robot body itself occupies cannot be solid).
void mark_free_disc(OccupancyGrid& grid, Vec2 center, double radius, int layers);

struct DetectedObject {
  Color color = Color::None;
  Vec3 centroid;
  double height_above_ground = 0.0;
  std::vector<Index3> support;
};

/// 6-connected components of Occupied cells per requested color, ordered
/// by color then lowest support cell.
std::vector<DetectedObject> detect_objects(const OccupancyGrid& grid, const std::set<Color>& colors);

/// Layers that collide with a ground robot.
inline constexpr int kRobotSlabLayers = 2;

/// Column view of the robot's slab: Occupied if any slab cell is Occupied,
/// Free if the floor cell is Free and none is Occupied, else Unknown.
Grid2<CellState> project_slab(const OccupancyGrid& grid, int layers = kRobotSlabLayers);

/// Free columns whose center is at least `robot_radius` from every
/// Occupied column center.
Grid2<std::uint8_t> traversable_columns(const Grid2<CellState>& slab, double resolution, double robot_radius);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest 8-connected path length in meters from `start` over traversable
/// columns. Diagonal moves need both orthogonal neighbors traversable. The
/// start itself need not be traversable.
Grid2<double> path_distances(const Grid2<std::uint8_t>& traversable, Index2 start, double resolution);

struct NbvParams {
  int gain_min = 10;
  int spacing_cells = 2;
  int headings = 8;
  /// Uses every ray_stride-th row and column of the sensor's ray grid.
  int ray_stride = 4;
};

struct ViewCandidate {
  Index2 cell;
  int heading_index = 0;
  Pose2 pose;
  int gain = 0;
  double path_distance = 0.0;
};

struct ExplorationComplete {
  int best_gain = 0;
};

class NoReachableCandidate : public Error {
 public:
  NoReachableCandidate() : Error("no reachable view candidate") {}
};

using CandidateKey = std::pair<Index2, int>;

/// Unknown cells visible from a sensor pose; rays stop at Occupied cells.
int view_gain(const OccupancyGrid& grid, const SensorModel& sensor, const SensorPose& pose, int ray_stride);

/// All candidate poses with gains and path distances (the exhaustive set
/// next_best_view chooses from).
std::vector<ViewCandidate> view_candidates(const OccupancyGrid& grid, const SensorModel& sensor, double robot_radius,
                                           const Pose2& current, const NbvParams& params = {},
                                           const std::set<CandidateKey>& excluded = {});

std::variant<ViewCandidate, ExplorationComplete> next_best_view(const OccupancyGrid& grid, const SensorModel& sensor,
                                                                double robot_radius, const Pose2& current,
                                                                const NbvParams& params = {},
                                                                const std::set<CandidateKey>& excluded = {});

/// One "x y z state color" line per non-Unknown cell.
std::string dump_map(const OccupancyGrid& grid);

}  // namespace msrr

#pragma once

#include <string>

#include "msrr/geometry.hpp"
#include "msrr/mapping.hpp"
#include "msrr/types.hpp"

namespace msrr {

struct CharacterizationParams {
  double robot_radius = 0.16;
  double cone_half_angle = deg_to_rad(20.0);
  double dist_threshold = 0.30;
  double high_threshold = 0.20;
  double region_extent = 2.0;
  /// Throws Error unless every field is positive and the cone is below 90 degrees.
  void validate() const;
};

struct Characterization {
  EnvironmentType env_type = EnvironmentType::Free;
  Pose2 staging_waypoint;
  double closest_reachable_distance = 0.0;
  Index2 staging_cell;
};

class NoReachablePoint : public Error {
 public:
  NoReachablePoint() : Error("no reachable cell inside the characterization cone") {}
};

/// Classifies the terrain around `object`. Reachable cells are unbloated
/// Free columns connected to the robot's column; the cone is centered on
/// the object-to-robot bearing.
Characterization characterize(const OccupancyGrid& grid, const DetectedObject& object, const Pose2& robot_pose,
                              const CharacterizationParams& params = {});

/// Text rendering of the characterization region, top row = largest y.
/// '#' occupied, 'x' bloated, '.' reachable, '?' unknown, 'o' object, 'Q' chosen cell.
std::string characterization_debug(const OccupancyGrid& grid, const DetectedObject& object,
                                   const Characterization& result, const CharacterizationParams& params = {});

}  // namespace msrr

#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>

#include "fixtures.hpp"
#include "msrr/envchar.hpp"
#include "msrr/executor.hpp"
#include "scenes.hpp"

using namespace msrr;

namespace {

void box(OccupancyGrid& g, Index3 lo, Index3 hi) { scene::fill(g, {lo, hi}, Color::Gray); }

}  // namespace

TEST_CASE("canonical scenes classify as their environment type") {
  const CharacterizationParams p;
  for (EnvironmentType t : kAllEnvironmentTypes) {
    CAPTURE(to_string(t));
    const scene::Scene s = scene::make(t);
    const DetectedObject o = scene::pink(s.grid);
    const Characterization c = characterize(s.grid, o, s.robot, p);
    CHECK(c.env_type == t);
    CHECK(c.closest_reachable_distance == doctest::Approx(scene::closest_distance(s.grid, o, s.robot, p)));
    CHECK(c.staging_waypoint.position == s.grid.shape().center(c.staging_cell));
    const Vec2 facing = o.centroid.xy() - c.staging_waypoint.position;
    CHECK(c.staging_waypoint.heading == doctest::Approx(std::atan2(facing.y, facing.x)));
  }
}

TEST_CASE("classification is stable under one-voxel obstacle jitter") {
  std::mt19937_64 rng(17);
  const CharacterizationParams p;
  for (EnvironmentType t : kAllEnvironmentTypes)
    for (int i = 0; i < 20; ++i) {
      const scene::Scene s = scene::make(t, &rng);
      const DetectedObject o = scene::pink(s.grid);
      const Characterization c = characterize(s.grid, o, s.robot, p);
      CAPTURE(to_string(t));
      CAPTURE(i);
      CHECK(c.env_type == t);
      CHECK(c.closest_reachable_distance == doctest::Approx(scene::closest_distance(s.grid, o, s.robot, p)));
    }
}

TEST_CASE("quarter turns of a scene rotate the answer with it") {
  std::mt19937_64 rng(23);
  const CharacterizationParams p;
  for (EnvironmentType t : kAllEnvironmentTypes)
    for (int trial = 0; trial < 4; ++trial) {
      scene::Scene s = trial == 0 ? scene::make(t) : scene::make(t, &rng);
      const Characterization a = characterize(s.grid, scene::pink(s.grid), s.robot, p);
      Index2 cell = a.staging_cell;
      for (int k = 1; k <= 3; ++k) {
        s = scene::rotated(s);
        cell = scene::rotate_column(cell);
        const Characterization b = characterize(s.grid, scene::pink(s.grid), s.robot, p);
        CAPTURE(to_string(t));
        CAPTURE(k);
        CHECK(b.env_type == a.env_type);
        CHECK(b.staging_cell == cell);
        CHECK(std::fabs(b.closest_reachable_distance - a.closest_reachable_distance) < 1e-12);
      }
    }
}

TEST_CASE("shipped scenarios characterize their targets") {
  const auto check = [](const std::string& name, Color color, EnvironmentType expected) {
    const WorldState w = fixture::world(name);
    const OccupancyGrid g = observed_grid(w);
    const auto objs = detect_objects(g, {color});
    REQUIRE_FALSE(objs.empty());
    CHECK(characterize(g, objs[0], w.robot.base).env_type == expected);
  };
  check("demo1", Color::Pink, EnvironmentType::Tunnel);
  check("demo1", Color::Green, EnvironmentType::Free);
  check("demo2", Color::Pink, EnvironmentType::Stairs);
  check("demo3", Color::Pink, EnvironmentType::High);
}

TEST_CASE("an enclosed robot has no reachable point") {
  scene::Scene s = scene::make(EnvironmentType::Free);
  box(s.grid, {0, 0, 0}, {12, 1, 2});
  box(s.grid, {0, 0, 0}, {1, 12, 2});
  box(s.grid, {11, 0, 0}, {12, 12, 2});
  box(s.grid, {0, 11, 0}, {12, 12, 2});
  s.robot.position = {0.5, 0.5};
  CharacterizationParams p;
  p.region_extent = 0.5;
  CHECK_THROWS_AS(characterize(s.grid, scene::pink(s.grid), s.robot, p), NoReachablePoint);
  p.region_extent = 2.0;
  CHECK(characterize(s.grid, scene::pink(s.grid), s.robot, p).env_type == EnvironmentType::Tunnel);
}

TEST_CASE("parameters are validated") {
  CharacterizationParams p;
  p.cone_half_angle = kPi / 2.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.dist_threshold = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK_NOTHROW(CharacterizationParams{}.validate());
}

TEST_CASE("debug rendering marks the object and the staging cell") {
  const scene::Scene s = scene::make(EnvironmentType::Tunnel);
  const DetectedObject o = scene::pink(s.grid);
  const auto c = characterize(s.grid, o, s.robot);
  const std::string text = characterization_debug(s.grid, o, c);
  CHECK(text.rfind("env tunnel", 0) == 0);
  CHECK(text.find('Q') != std::string::npos);
  CHECK(text.find('o') != std::string::npos);
  CHECK(text.find('#') != std::string::npos);
}

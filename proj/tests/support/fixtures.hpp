#pragma once

#include <string>

#include "msrr/library.hpp"
#include "msrr/scenario.hpp"
#include "msrr/world.hpp"

namespace fixture {

inline std::string data(const std::string& rel) { return std::string(MSRR_DATA_DIR) + "/" + rel; }

inline const msrr::Library& library() {
  static const msrr::Library lib = msrr::load_library(data("library/default_library.json"));
  return lib;
}

inline msrr::Scenario scenario(const std::string& name) {
  return msrr::load_scenario(data("scenarios/" + name + "/scenario.json"));
}

inline msrr::WorldState world(const std::string& name) { return msrr::make_world(scenario(name), library()); }

inline const msrr::LibraryEntry& entry(const std::string& config, const std::string& behavior) {
  for (const auto& e : library().entries())
    if (e.configuration == config && e.behavior.name == behavior) return e;
  throw msrr::Error("no entry " + config + "." + behavior);
}

/// Empty world of the given size with a one-module robot parked at `p`.
inline msrr::WorldState empty_world(int nx, int ny, int nz, msrr::Vec2 p = {0.5, 0.5}) {
  msrr::WorldState s;
  s.voxels = msrr::Grid3<msrr::Voxel>(msrr::GridShape{nx, ny, nz, 0.08, {}}, msrr::Voxel{});
  s.modules.push_back({1, msrr::ModuleKind::Sensor, {p.x, p.y, 0.0}, 0.0, {}});
  s.robot.sensor_module = 1;
  s.robot.configuration = "Car";
  s.robot.base = {p, 0.0};
  return s;
}

}  // namespace fixture

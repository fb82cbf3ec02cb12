#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msrr/executor.hpp"

namespace msrr {

std::string_view to_string(MissionEventKind k) {
  switch (k) {
    case MissionEventKind::ObjectDetected: return "object_detected";
    case MissionEventKind::Characterized: return "characterized";
    case MissionEventKind::StateTransition: return "state_transition";
    case MissionEventKind::BehaviorStarted: return "behavior_started";
    case MissionEventKind::BehaviorDone: return "behavior_done";
    case MissionEventKind::ReconfigStarted: return "reconfig_started";
    case MissionEventKind::ReconfigDone: return "reconfig_done";
    case MissionEventKind::MissionComplete: return "mission_complete";
    case MissionEventKind::MissionFailed: return "mission_failed";
  }
  return "mission_failed";
}

std::string to_jsonl(const std::vector<MissionEvent>& events) {
  std::ostringstream out;
  for (const auto& e : events) {
    nlohmann::json j;
    j["tick"] = e.tick;
    j["kind"] = std::string(to_string(e.kind));
    j["payload"] = e.payload.empty() ? nlohmann::json::object() : nlohmann::json::parse(e.payload);
    out << j.dump() << '\n';
  }
  return out.str();
}

Valuation evaluate_propositions(const MissionSpec& spec, const Percepts& percepts) {
  Valuation v = 0;
  for (std::size_t i = 0; i < spec.props.size(); ++i) {
    const Proposition& p = spec.props[i];
    if (p.side != Side::Env) continue;
    const std::string& f = p.binding.function;
    bool value = false;
    if (f == "seen") {
      for (const auto& arg : p.binding.args) {
        const Color c = parse_color(arg);
        value = value || std::any_of(percepts.detections.begin(), percepts.detections.end(),
                                     [&](const DetectedObject& d) { return d.color == c; });
      }
    } else if (f == "pending") {
      for (const auto& arg : p.binding.args) value = value || percepts.pending_colors.count(parse_color(arg)) > 0;
    } else if (f == "env_type_is" || f == "env-type-is") {
      if (p.binding.args.size() != 1) throw Error("env_type_is takes one environment type");
      const auto t = parse_environment_type(p.binding.args[0]);
      if (!t) throw Error("unknown environment type '" + p.binding.args[0] + "'");
      value = percepts.characterization == t;
    } else if (f == "carrying") {
      value = percepts.carrying;
    } else if (f == "exploration_done") {
      value = percepts.exploration_done;
    } else {
      throw Error("unknown sensing function '" + f + "' bound to " + p.name);
    }
    if (value) v |= 1u << i;
  }
  return v;
}

Selection select_behavior(const Library& lib, std::string_view property, EnvironmentType env,
                          std::string_view current_config, Rng& rng, const std::set<std::string>& reachable) {
  const auto candidates = lib.query(property, env);
  if (candidates.empty()) throw NoCapableEntry(property, env);
  for (const auto& e : candidates)
    if (e.configuration == current_config) return {e, false};
  std::vector<LibraryEntry> allowed;
  for (const auto& e : candidates)
    if (reachable.empty() || reachable.count(e.configuration)) allowed.push_back(e);
  if (allowed.empty()) throw NoCapableEntry(property, env);
  std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
  return {allowed[pick(rng)], true};
}

OccupancyGrid observed_grid(const WorldState& world) {
  const GridShape& shape = world.voxels.shape();
  OccupancyGrid g(shape);
  for (std::size_t i = 0; i < shape.cell_count(); ++i) {
    const Index3 c = shape.unlinear(i);
    if (auto color = solid_at(world, c))
      g.mark_occupied(c, *color);
    else
      g.mark_free(c);
  }
  return g;
}

double reachable_unknown_fraction(const WorldState& truth, const OccupancyGrid& belief, double robot_radius) {
  const GridShape& shape = truth.voxels.shape();
  const auto slab = project_slab(observed_grid(truth));
  auto trav = traversable_columns(slab, shape.resolution, robot_radius);
  const Index2 start = shape.column_of(truth.robot.base.position);
  if (!shape.contains(start)) return 0.0;
  trav[start] = 1;
  const auto dist = path_distances(trav, start, shape.resolution);
  const auto seen = project_slab(belief);
  std::size_t reachable = 0;
  std::size_t unknown = 0;
  for (int y = 0; y < shape.ny; ++y)
    for (int x = 0; x < shape.nx; ++x) {
      if (dist[{x, y}] == kUnreachable) continue;
      ++reachable;
      if (seen[{x, y}] == CellState::Unknown) ++unknown;
    }
  return reachable == 0 ? 0.0 : static_cast<double>(unknown) / static_cast<double>(reachable);
}

}  // namespace msrr

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msrr/reconfig.hpp"

namespace msrr {

using nlohmann::json;

std::string_view to_string(PlanErrorKind k) {
  switch (k) {
    case PlanErrorKind::TopologyMismatch: return "topology_mismatch";
    case PlanErrorKind::FaceConflict: return "face_conflict";
    case PlanErrorKind::Collision: return "collision";
    case PlanErrorKind::OutOfZone: return "out_of_zone";
  }
  return "topology_mismatch";
}

std::string_view to_string(ReconfigEventKind k) {
  switch (k) {
    case ReconfigEventKind::Detached: return "detached";
    case ReconfigEventKind::WaypointReached: return "waypoint_reached";
    case ReconfigEventKind::Aligned: return "aligned";
    case ReconfigEventKind::Docked: return "docked";
    case ReconfigEventKind::VerifyOk: return "verify_ok";
  }
  return "detached";
}

std::string_view to_string(ReconfigFailureKind k) {
  switch (k) {
    case ReconfigFailureKind::ModuleOutOfZone: return "module_out_of_zone";
    case ReconfigFailureKind::DockMisaligned: return "dock_misaligned";
    case ReconfigFailureKind::Timeout: return "timeout";
    case ReconfigFailureKind::Fault: return "fault";
  }
  return "fault";
}

ReconfigurationPlan parse_plan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    throw ParseError(e.what(), 1 + static_cast<int>(std::count(upto.begin(), upto.end(), '\n')));
  }
  ReconfigurationPlan plan;
  try {
    plan.name = doc.value("name", std::string());
    plan.from = doc.at("from").get<std::string>();
    plan.to = doc.at("to").get<std::string>();
    const auto steps = doc.value("steps", json::array());
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const json& s = steps[i];
      const std::string op = s.at("op").get<std::string>();
      const ModuleId m = s.at("module").get<int>();
      if (op == "detach") {
        plan.steps.push_back(DetachStep{m, parse_face(s.at("face").get<std::string>())});
      } else if (op == "move") {
        MoveStep mv{m, {}};
        for (const auto& w : s.at("waypoints")) {
          const auto xy = w.get<std::vector<double>>();
          if (xy.size() != 2) throw ParseError("steps[" + std::to_string(i) + "]: waypoint must be [x, y]");
          mv.waypoints.push_back({xy[0], xy[1]});
        }
        plan.steps.push_back(std::move(mv));
      } else if (op == "dock") {
        plan.steps.push_back(DockStep{m, parse_face(s.at("face").get<std::string>()), s.at("target").get<int>(),
                                      parse_face(s.at("target_face").get<std::string>())});
      } else {
        throw ParseError("steps[" + std::to_string(i) + "]: unknown op '" + op + "'");
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  return plan;
}

ReconfigurationPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str());
}

std::vector<ReconfigurationPlan> load_plans(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ReconfigurationPlan> plans;
  for (const auto& f : files) plans.push_back(load_plan(f));
  return plans;
}

const ReconfigurationPlan* find_plan(const std::vector<ReconfigurationPlan>& plans, std::string_view from,
                                     std::string_view to) {
  for (const auto& p : plans)
    if (p.from == from && p.to == to) return &p;
  return nullptr;
}

Pose2 dock_pose(const ModuleNode& target, Face target_face, ModuleKind kind, Face face) {
  const Index3 n = face_normal(target, target_face);
  const Index3 own = face_normal_local(kind, face);
  const Vec2 pos = target.local_position() + Vec2{n.x * kModuleSize, n.y * kModuleSize};
  const double heading = std::atan2(-n.y, -n.x) - std::atan2(own.y, own.x);
  return {pos, wrap_angle(heading)};
}

std::optional<PlanError> validate_plan(const ReconfigurationPlan& plan, const Library& lib,
                                       const ReconfigParams& params) {
  using K = PlanErrorKind;
  const ConfigurationGraph& from = lib.configuration(plan.from);
  const ConfigurationGraph& to = lib.configuration(plan.to);
  ConfigurationGraph g = from;
  std::map<ModuleId, Vec2> pos;
  for (const auto& m : g.modules()) pos[m.id] = m.local_position();
  std::set<ModuleId> free_modules;

  const auto clear_of = [&](Vec2 a, Vec2 b, ModuleId self, std::optional<ModuleId> skip) -> std::optional<PlanError> {
    for (const auto& [id, p] : pos) {
      if (id == self || (skip && id == *skip)) continue;
      if (point_segment_distance(p, a, b) < params.clearance - 1e-9)
        return PlanError{K::Collision, "module " + std::to_string(self) + " passes within " +
                                           std::to_string(params.clearance) + " m of module " + std::to_string(id)};
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const std::string where = "step " + std::to_string(i) + ": ";
    if (const auto* d = std::get_if<DetachStep>(&plan.steps[i])) {
      if (!g.find(d->module)) return PlanError{K::TopologyMismatch, where + "unknown module"};
      if (!g.disconnect(d->module, d->face))
        return PlanError{K::TopologyMismatch, where + "no connection on module " + std::to_string(d->module) + "." +
                                                  std::string(to_string(d->face))};
      if (g.degree(d->module) == 0) free_modules.insert(d->module);
    } else if (const auto* mv = std::get_if<MoveStep>(&plan.steps[i])) {
      if (!free_modules.count(mv->module))
        return PlanError{K::TopologyMismatch, where + "module " + std::to_string(mv->module) + " is still attached"};
      Vec2 cur = pos.at(mv->module);
      for (const auto& w : mv->waypoints) {
        if (!in_reconfig_zone(w)) return PlanError{K::OutOfZone, where + "waypoint outside the localization zone"};
        if (auto err = clear_of(cur, w, mv->module, std::nullopt)) return err;
        cur = w;
      }
      pos[mv->module] = cur;
    } else if (const auto* dk = std::get_if<DockStep>(&plan.steps[i])) {
      ModuleNode* self = g.find(dk->module);
      const ModuleNode* target = g.find(dk->target);
      if (!self || !target) return PlanError{K::TopologyMismatch, where + "unknown module"};
      if (!free_modules.count(dk->module))
        return PlanError{K::TopologyMismatch, where + "docking module is still attached"};
      if (!kind_has_face(self->kind, dk->face) || !kind_has_face(target->kind, dk->target_face))
        return PlanError{K::TopologyMismatch, where + "face not available on module kind"};
      if (g.connection_at(dk->target, dk->target_face) || g.connection_at(dk->module, dk->face))
        return PlanError{K::FaceConflict, where + "face already connected"};
      const Pose2 dock = dock_pose(*target, dk->target_face, self->kind, dk->face);
      const Index3 n = face_normal(*target, dk->target_face);
      const Index3 cell{target->cell.x + n.x, target->cell.y + n.y, target->cell.z + n.z};
      for (const auto& m : g.modules())
        if (m.id != dk->module && m.cell == cell)
          return PlanError{K::FaceConflict, where + "dock cell is occupied by module " + std::to_string(m.id)};
      const Vec2 normal{static_cast<double>(n.x), static_cast<double>(n.y)};
      const Vec2 predock = dock.position + normal * params.standoff;
      const Vec2 through = dock.position - normal * params.overdrive;
      if (!in_reconfig_zone(predock) || !in_reconfig_zone(dock.position))
        return PlanError{K::OutOfZone, where + "dock approach outside the localization zone"};
      if (auto err = clear_of(pos.at(dk->module), predock, dk->module, std::nullopt)) return err;
      if (auto err = clear_of(predock, through, dk->module, dk->target)) return err;
      self->cell = cell;
      self->yaw_quarters = static_cast<int>(std::lround(dock.heading / (kPi / 2.0)));
      g.connect({dk->target, dk->target_face, dk->module, dk->face});
      free_modules.erase(dk->module);
      pos[dk->module] = dock.position;
    }
  }
  if (!free_modules.empty()) return PlanError{K::TopologyMismatch, "plan leaves modules detached"};
  try {
    g.validate();
  } catch (const InvalidConfiguration& e) {
    return PlanError{K::TopologyMismatch, e.what()};
  }
  if (!find_isomorphism(g, to)) return PlanError{K::TopologyMismatch, "result is not isomorphic to " + to.name()};
  return std::nullopt;
}

}  // namespace msrr

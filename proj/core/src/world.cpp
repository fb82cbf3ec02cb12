#include "msrr/world.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace msrr {
namespace {

// Unicycle integration; exact on arcs so pure rotations never translate.
void integrate_unicycle(Vec2& position, double& heading, double v, double omega, double dt) {
  if (std::fabs(omega) < 1e-12) {
    position = position + Vec2{std::cos(heading), std::sin(heading)} * (v * dt);
  } else if (v == 0.0) {
    heading = wrap_angle(heading + omega * dt);
    return;
  } else {
    const double h1 = heading + omega * dt;
    const double r = v / omega;
    position = position + Vec2{r * (std::sin(h1) - std::sin(heading)), -r * (std::cos(h1) - std::cos(heading))};
  }
  heading = wrap_angle(heading + omega * dt);
}

std::map<ModuleId, Vec3> carrier_positions(const WorldState& s) {
  std::map<ModuleId, Vec3> out;
  for (const auto& o : s.objects)
    if (o.carried_by)
      if (const ModulePose* m = s.module(*o.carried_by)) out[*o.carried_by] = m->position;
  return out;
}

void drag_carried(WorldState& s, const std::map<ModuleId, Vec3>& before) {
  for (auto& o : s.objects) {
    if (!o.carried_by) continue;
    auto it = before.find(*o.carried_by);
    const ModulePose* m = s.module(*o.carried_by);
    if (it == before.end() || !m) continue;
    o.position = o.position + (m->position - it->second);
  }
}

TaskObject* carried_object(WorldState& s) {
  for (auto& o : s.objects)
    if (o.carried_by && (*o.carried_by == s.robot.sensor_module || s.robot.members.count(*o.carried_by)))
      return &o;
  return nullptr;
}

const StairFlight* nearest_flight(const WorldState& s, Vec2 p, double max_dist, bool landing) {
  const double res = s.voxels.shape().resolution;
  const StairFlight* best = nullptr;
  double best_d = max_dist;
  for (const auto& f : s.stairs) {
    if (landing) {
      if (f.on_landing(p, res)) return &f;
      continue;
    }
    const double d = distance(p, f.base_point(res));
    if (d <= best_d) {
      best_d = d;
      best = &f;
    }
  }
  return best;
}

void set_robot_pose(WorldState& s, Pose2 base, double z) {
  const auto before = carrier_positions(s);
  const Pose2 old = s.robot.base;
  const double old_z = s.robot.z;
  s.robot.base = base;
  s.robot.z = z;
  for (auto& m : s.modules) {
    if (m.id != s.robot.sensor_module && !s.robot.members.count(m.id)) continue;
    const Vec2 local = old.inverse_transform(m.position.xy());
    const Vec2 p = base.transform(local);
    m.position = {p.x, p.y, m.position.z - old_z + z};
    m.heading = wrap_angle(m.heading - old.heading + base.heading);
  }
  drag_carried(s, before);
}

}  // namespace

std::string_view to_string(FaultCategory c) {
  switch (c) {
    case FaultCategory::Hardware: return "hardware";
    case FaultCategory::Navigation: return "navigation";
    case FaultCategory::Perception: return "perception";
    case FaultCategory::Network: return "network";
  }
  return "hardware";
}

std::string_view to_string(BehaviorFailureReason r) {
  switch (r) {
    case BehaviorFailureReason::EnvMismatch: return "env_mismatch";
    case BehaviorFailureReason::OutOfReach: return "out_of_reach";
    case BehaviorFailureReason::NoTarget: return "no_target";
  }
  return "no_target";
}

double FaultProfile::probability(FaultCategory c) const {
  switch (c) {
    case FaultCategory::Hardware: return hardware;
    case FaultCategory::Navigation: return navigation;
    case FaultCategory::Perception: return perception;
    case FaultCategory::Network: return network;
  }
  return 0.0;
}

void FaultProfile::validate() const {
  for (auto c : {FaultCategory::Hardware, FaultCategory::Navigation, FaultCategory::Perception,
                 FaultCategory::Network}) {
    const double p = probability(c);
    if (!(p >= 0.0 && p <= 1.0))
      throw Error("fault probability for " + std::string(to_string(c)) + " must lie in [0, 1]");
  }
}

std::optional<FaultCategory> FaultInjector::roll() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::optional<FaultCategory> fired;
  for (auto c : {FaultCategory::Hardware, FaultCategory::Navigation, FaultCategory::Perception,
                 FaultCategory::Network}) {
    const double draw = u(rng_);
    if (!fired && draw < profile_.probability(c)) fired = c;
  }
  return fired;
}

Vec2 StairFlight::along() const { return rotate({1.0, 0.0}, direction * kPi / 2.0); }
Vec2 StairFlight::lateral() const { return rotate({0.0, 1.0}, direction * kPi / 2.0); }

namespace {
Vec2 flight_origin(const StairFlight& f, double res) {
  const Vec2 center{(f.start.x + 0.5) * res, (f.start.y + 0.5) * res};
  return center - f.along() * (0.5 * res) - f.lateral() * (0.5 * res);
}
}  // namespace

Vec2 StairFlight::base_point(double res) const {
  return flight_origin(*this, res) + lateral() * (width * 0.5 * res);
}

Vec2 StairFlight::landing_point(double res) const {
  return flight_origin(*this, res) + along() * (((steps - 1) * step_depth + 1.5) * res) +
         lateral() * (width * 0.5 * res);
}

bool StairFlight::on_landing(Vec2 p, double res) const {
  const Vec2 d = p - flight_origin(*this, res);
  const Vec2 a = along();
  const Vec2 l = lateral();
  const double u = (d.x * a.x + d.y * a.y) / res;
  const double v = (d.x * l.x + d.y * l.y) / res;
  return u >= (steps - 1) * step_depth && u <= total_depth_cells() && v >= 0.0 && v <= width;
}

const ModulePose* WorldState::module(ModuleId id) const {
  for (const auto& m : modules)
    if (m.id == id) return &m;
  return nullptr;
}

ModulePose* WorldState::module(ModuleId id) {
  for (auto& m : modules)
    if (m.id == id) return &m;
  return nullptr;
}

void step_world(WorldState& state, const StepCommands& commands, double dt) {
  if (!(dt > 0.0)) throw Error("step_world: dt must be positive");
  for (const auto& [id, _] : commands.modules)
    if (!state.module(id)) throw UnknownModule(id);

  const auto before = carrier_positions(state);
  const auto attached = [&](ModuleId id) {
    return id == state.robot.sensor_module || state.robot.members.count(id) > 0;
  };

  for (const auto& [id, cmd] : commands.modules) {
    ModulePose& m = *state.module(id);
    m.joints[kLeftWheel] += cmd.left_wheel * dt;
    m.joints[kRightWheel] += cmd.right_wheel * dt;
    m.joints[kPan] = std::clamp(m.joints[kPan] + cmd.pan * dt, -kJointLimit, kJointLimit);
    m.joints[kTilt] = std::clamp(m.joints[kTilt] + cmd.tilt * dt, -kJointLimit, kJointLimit);
    if (attached(id) || m.kind != ModuleKind::Body) continue;
    const double v = kWheelRadius * (cmd.left_wheel + cmd.right_wheel) / 2.0;
    const double omega = kWheelRadius * (cmd.right_wheel - cmd.left_wheel) / kTrackWidth;
    Vec2 p = m.position.xy();
    integrate_unicycle(p, m.heading, v, omega, dt);
    m.position.x = p.x;
    m.position.y = p.y;
  }

  if (commands.cluster) {
    Pose2 base = state.robot.base;
    integrate_unicycle(base.position, base.heading, commands.cluster->v, commands.cluster->omega, dt);
    const Pose2 old = state.robot.base;
    state.robot.base = base;
    for (auto& m : state.modules) {
      if (!attached(m.id)) continue;
      const Vec2 p = base.transform(old.inverse_transform(m.position.xy()));
      m.position.x = p.x;
      m.position.y = p.y;
      m.heading = wrap_angle(m.heading - old.heading + base.heading);
    }
  }
  drag_carried(state, before);
  ++state.tick;
}

WorldState stepped(WorldState state, const StepCommands& commands, double dt) {
  step_world(state, commands, dt);
  return state;
}

void place_cluster(WorldState& state, const ConfigurationGraph& config) {
  const auto before = carrier_positions(state);
  const Robot& r = state.robot;
  for (const auto& node : config.modules()) {
    auto it = r.binding.find(node.id);
    if (it == r.binding.end()) throw Error("configuration node " + std::to_string(node.id) + " is unbound");
    ModulePose* m = state.module(it->second);
    if (!m) throw UnknownModule(it->second);
    const Vec2 p = r.base.transform(node.local_position());
    m->position = {p.x, p.y, r.z + node.cell.z * kModuleSize};
    m->heading = wrap_angle(r.base.heading + node.local_yaw());
  }
  drag_carried(state, before);
}

SensorPose robot_sensor_pose(const WorldState& state) {
  return {{state.robot.base.position.x, state.robot.base.position.y, state.robot.z + state.sensor.mount_height},
          state.robot.base.heading,
          state.sensor.pitch};
}

std::optional<Color> solid_at(const WorldState& state, Index3 cell) {
  const auto& shape = state.voxels.shape();
  if (!shape.contains(cell)) return std::nullopt;
  const Voxel& v = state.voxels[cell];
  if (v.solid) return v.color;
  for (const auto& o : state.objects)
    if (!o.carried_by && shape.cell_of(o.position) == cell) return o.color;
  return std::nullopt;
}

Vec3 sensor_ray_direction(const SensorModel& model, const SensorPose& pose, int column, int row) {
  const double az = -model.fov_h / 2.0 + (column + 0.5) * model.fov_h / model.rays_h;
  const double el = -model.fov_v / 2.0 + (row + 0.5) * model.fov_v / model.rays_v;
  // Camera frame: +x optical axis, +y left, +z up. Pitch about +y (up positive), then yaw.
  const Vec3 c{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  const double cp = std::cos(pose.pitch);
  const double sp = std::sin(pose.pitch);
  const Vec3 pitched{c.x * cp - c.z * sp, c.y, c.x * sp + c.z * cp};
  const Vec2 yawed = rotate({pitched.x, pitched.y}, pose.yaw);
  return {yawed.x, yawed.y, pitched.z};
}

SensorFrame render_depth(const WorldState& state, const SensorPose& pose) {
  const SensorModel& model = state.sensor;
  SensorFrame frame;
  frame.pose = pose;
  frame.fov_h = model.fov_h;
  frame.fov_v = model.fov_v;
  frame.max_range = model.max_range;
  frame.rays.reserve(static_cast<std::size_t>(model.rays_h) * model.rays_v);
  const auto& shape = state.voxels.shape();
  for (int row = 0; row < model.rays_v; ++row) {
    for (int col = 0; col < model.rays_h; ++col) {
      RayHit ray;
      ray.direction = sensor_ray_direction(model, pose, col, row);
      ray.range = model.max_range;
      traverse_voxels(shape, pose.position, ray.direction, model.max_range,
                      [&](Index3 cell, double t_enter, double) {
                        if (auto color = solid_at(state, cell)) {
                          ray.hit = true;
                          ray.range = t_enter;
                          ray.color = *color;
                          return false;
                        }
                        return true;
                      });
      frame.rays.push_back(ray);
    }
  }
  return frame;
}

bool in_reconfig_zone(Vec2 local) {
  return local.x >= -1e-9 && local.x <= kZoneDepth + 1e-9 && std::fabs(local.y) <= kZoneWidth / 2.0 + 1e-9;
}

std::vector<ModulePose> reconfig_zone_poses(const WorldState& state, ModuleId sensor_module,
                                            const PoseNoise& noise, Rng& rng) {
  const ModulePose* sensor = state.module(sensor_module);
  if (!sensor) throw UnknownModule(sensor_module);
  const Pose2 frame = sensor->planar();
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<ModulePose> out;
  for (const auto& m : state.modules) {
    if (m.id == sensor_module) continue;
    if (!in_reconfig_zone(frame.inverse_transform(m.position.xy()))) continue;
    ModulePose seen = m;
    if (noise.position_std > 0.0) {
      seen.position.x += noise.position_std * unit(rng);
      seen.position.y += noise.position_std * unit(rng);
    }
    if (noise.heading_std > 0.0) seen.heading = wrap_angle(seen.heading + noise.heading_std * unit(rng));
    out.push_back(seen);
  }
  return out;
}

std::optional<BehaviorFailure> apply_behavior_effect(WorldState& state, const LibraryEntry& entry,
                                                     EnvironmentType env,
                                                     const std::optional<BehaviorTarget>& target) {
  using R = BehaviorFailureReason;
  if (entry.behavior.kind != BehaviorKind::Effect)
    throw Error(entry.label() + " is not an effect behavior");
  if (!entry.environments.count(env))
    return BehaviorFailure{R::EnvMismatch, entry.label() + " is not rated for " + std::string(to_string(env))};

  const double res = state.voxels.shape().resolution;
  const Vec2 base = state.robot.base.position;
  const double reach = entry.value_or("reach", 0.30);

  switch (entry.behavior.effect) {
    case EffectKind::PickUp: {
      if (!target) return BehaviorFailure{R::NoTarget, "pickUp needs a target"};
      if (carried_object(state)) return BehaviorFailure{R::NoTarget, "already carrying an object"};
      TaskObject* best = nullptr;
      double best_d = 2.0 * res;
      for (auto& o : state.objects) {
        if (o.carried_by || (target->color != Color::None && o.color != target->color)) continue;
        const double d = (o.position - target->position).norm();
        if (d <= best_d) {
          best_d = d;
          best = &o;
        }
      }
      if (!best) return BehaviorFailure{R::NoTarget, "no object at the target location"};
      if (distance(base, best->position.xy()) > reach + 1e-9)
        return BehaviorFailure{R::OutOfReach, "object beyond reach of " + entry.label()};
      best->carried_by = state.robot.sensor_module;
      best->position = {base.x, base.y, state.robot.z + 0.2};
      return std::nullopt;
    }
    case EffectKind::Drop: {
      TaskObject* held = carried_object(state);
      if (!held) return BehaviorFailure{R::NoTarget, "nothing to drop"};
      if (target && distance(base, target->position.xy()) > reach + 1e-9)
        return BehaviorFailure{R::OutOfReach, "drop location beyond reach of " + entry.label()};
      const Vec2 ahead = state.robot.base.transform({0.12, 0.0});
      held->carried_by.reset();
      held->position = {ahead.x, ahead.y, state.robot.z + res / 2.0};
      return std::nullopt;
    }
    case EffectKind::HighReach: {
      TaskObject* held = carried_object(state);
      if (!held) return BehaviorFailure{R::NoTarget, "nothing to place"};
      if (!target) return BehaviorFailure{R::NoTarget, "highReach needs a target"};
      const double height = target->position.z - state.robot.z;
      if (height > entry.value_or("max_height", 0.35) + 1e-9 || distance(base, target->position.xy()) > reach + 1e-9)
        return BehaviorFailure{R::OutOfReach, "target beyond reach of " + entry.label()};
      held->carried_by.reset();
      held->position = target->position;
      return std::nullopt;
    }
    case EffectKind::ClimbUp:
    case EffectKind::ClimbDown: {
      const bool up = entry.behavior.effect == EffectKind::ClimbUp;
      const StairFlight* flight = up ? nearest_flight(state, base, 0.40, false) : nearest_flight(state, base, 0.0, true);
      if (!flight) return BehaviorFailure{R::NoTarget, up ? "no stairs ahead" : "not standing on a landing"};
      const double rated = entry.value_or("rated_stair_rise", kModuleSize);
      if (flight->rise > rated + 1e-9) {
        std::ostringstream why;
        why << "stair rise " << flight->rise << " m exceeds rated " << rated << " m";
        return BehaviorFailure{R::EnvMismatch, why.str()};
      }
      const double heading = flight->direction * kPi / 2.0;
      if (up) {
        set_robot_pose(state, {flight->landing_point(res), heading}, flight->steps * flight->rise);
      } else {
        set_robot_pose(state, {flight->base_point(res) - flight->along() * 0.16, heading}, 0.0);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string serialize_state(const WorldState& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& v : s.voxels.data()) {
    h = (h ^ (v.solid ? 1u : 0u)) * 1099511628211ull;
    h = (h ^ static_cast<unsigned>(v.color)) * 1099511628211ull;
  }
  out << "tick " << s.tick << " voxels " << h << "\n";
  out << "robot " << s.robot.configuration << ' ' << s.robot.base.position.x << ' ' << s.robot.base.position.y
      << ' ' << s.robot.z << ' ' << s.robot.base.heading << "\n";
  for (const auto& m : s.modules) {
    out << "module " << m.id << ' ' << m.position.x << ' ' << m.position.y << ' ' << m.position.z << ' '
        << m.heading;
    for (double j : m.joints) out << ' ' << j;
    out << "\n";
  }
  for (const auto& o : s.objects)
    out << "object " << o.id << ' ' << to_string(o.color) << ' ' << o.position.x << ' ' << o.position.y << ' '
        << o.position.z << ' ' << (o.carried_by ? std::to_string(*o.carried_by) : "-") << "\n";
  return out.str();
}

}  // namespace msrr

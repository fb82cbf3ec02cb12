#include <algorithm>
#include <cmath>

#include "msrr/nav.hpp"
#include "msrr/reconfig.hpp"

namespace msrr {
namespace {

struct Failed {
  ReconfigFailure failure;
};

class PlanRunner {
 public:
  PlanRunner(WorldState& world, const ReconfigParams& params, Rng& rng) : w_(world), p_(params), rng_(rng) {}

  void start_clock() { start_tick_ = w_.tick; }
  double elapsed() const { return static_cast<double>(w_.tick - start_tick_) * kTickSeconds; }

  Pose2 frame() const { return w_.module(w_.robot.sensor_module)->planar(); }

  // Measured pose of `m` in the sensor frame.
  Pose2 measure(ModuleId m) {
    const auto seen = reconfig_zone_poses(w_, w_.robot.sensor_module, p_.noise, rng_);
    auto it = std::find_if(seen.begin(), seen.end(), [&](const ModulePose& mp) { return mp.id == m; });
    if (it == seen.end()) fail(ReconfigFailureKind::ModuleOutOfZone, m, "module left the localization zone");
    const Pose2 f = frame();
    return {f.inverse_transform(it->position.xy()), wrap_angle(it->heading - f.heading)};
  }

  void tick(ModuleId m, DriveCommand cmd, double tilt = 0.0) {
    if (elapsed() > p_.module_budget_s) fail(ReconfigFailureKind::Timeout, m, "module exceeded its time budget");
    const auto [l, r] = to_wheel_speeds(cmd, kTrackWidth, kWheelRadius);
    StepCommands c;
    c.modules[m] = {l, r, 0.0, tilt};
    step_world(w_, c, kTickSeconds);
    const Pose2 f = frame();
    if (!in_reconfig_zone(f.inverse_transform(w_.module(m)->position.xy())))
      fail(ReconfigFailureKind::ModuleOutOfZone, m, "module left the localization zone");
  }

  void wiggle(ModuleId m) {
    for (int i = 0; i < 8; ++i) tick(m, {}, i < 4 ? 0.6 : -0.6);
  }

  void drive_to(ModuleId m, Vec2 target) {
    while (true) {
      const Pose2 pose = measure(m);
      const Vec2 d = target - pose.position;
      const double dist = d.norm();
      if (dist < p_.waypoint_tol) return;
      const double alpha = wrap_angle(std::atan2(d.y, d.x) - pose.heading);
      DriveCommand cmd;
      if (std::fabs(alpha) > deg_to_rad(25.0)) {
        cmd.omega = std::copysign(std::clamp(2.0 * std::fabs(alpha), 0.3, p_.omega), alpha);
      } else {
        cmd.v = std::min(p_.v, 1.5 * dist + 0.01);
        cmd.omega = std::clamp(2.0 * alpha, -p_.omega, p_.omega);
      }
      tick(m, cmd);
    }
  }

  void align(ModuleId m, double heading) {
    while (true) {
      const double err = wrap_angle(heading - measure(m).heading);
      if (std::fabs(err) < p_.align_tol) return;
      tick(m, {0.0, std::copysign(std::clamp(2.0 * std::fabs(err), 0.15, p_.omega), err)});
    }
  }

  // Drives along the dock line through the dock point by the overdrive distance.
  void approach(ModuleId m, const Pose2& dock, Vec2 normal, double direction) {
    const Vec2 start = dock.position + normal * p_.standoff;
    const Vec2 along = normal * -1.0;
    const double length = p_.standoff + p_.overdrive;
    while (true) {
      const Pose2 pose = measure(m);
      const Vec2 rel = pose.position - start;
      const double progress = rel.x * along.x + rel.y * along.y;
      if (progress >= length) return;
      const double cross = along.x * rel.y - along.y * rel.x;  // left of the line is positive
      const double herr = wrap_angle(dock.heading - pose.heading);
      const double omega = std::clamp(2.0 * herr - 4.0 * cross, -p_.omega, p_.omega);
      tick(m, {direction * std::min(p_.v, 1.5 * (length - progress) + 0.01), omega});
    }
  }

  [[noreturn]] void fail(ReconfigFailureKind kind, ModuleId m, std::string detail) {
    throw Failed{{kind, m, std::move(detail), std::nullopt}};
  }

 private:
  WorldState& w_;
  const ReconfigParams& p_;
  Rng& rng_;
  std::uint64_t start_tick_ = 0;
};

}  // namespace

ReconfigOutcome execute_plan(const ReconfigurationPlan& plan, WorldState& world, const Library& lib,
                             const ReconfigParams& params, Rng& rng, FaultInjector* faults) {
  if (world.robot.configuration != plan.from)
    throw Error("plan " + plan.name + " starts from " + plan.from + " but the robot is " + world.robot.configuration);
  const ConfigurationGraph& to = lib.configuration(plan.to);
  ConfigurationGraph g = lib.configuration(plan.from);
  const auto binding = world.robot.binding;
  const auto phys = [&](ModuleId node) {
    auto it = binding.find(node);
    if (it == binding.end()) throw Error("plan references unbound module " + std::to_string(node));
    return it->second;
  };
  PlanRunner run(world, params, rng);
  ReconfigReport report;
  const auto log = [&](ReconfigEventKind k, ModuleId m) { report.events.push_back({k, m, world.tick}); };

  try {
    for (const auto& step : plan.steps) {
      if (faults)
        if (auto fault = faults->roll())
          return ReconfigFailure{ReconfigFailureKind::Fault, -1,
                                 "injected " + std::string(to_string(*fault)) + " fault", fault};
      if (const auto* d = std::get_if<DetachStep>(&step)) {
        const ModuleId m = phys(d->module);
        run.start_clock();
        run.wiggle(m);
        if (!g.disconnect(d->module, d->face)) throw Error("plan detaches an unconnected face");
        if (g.degree(d->module) == 0) world.robot.members.erase(m);
        log(ReconfigEventKind::Detached, m);
      } else if (const auto* mv = std::get_if<MoveStep>(&step)) {
        const ModuleId m = phys(mv->module);
        for (const auto& wpt : mv->waypoints) {
          run.drive_to(m, wpt);
          log(ReconfigEventKind::WaypointReached, m);
        }
      } else if (const auto* dk = std::get_if<DockStep>(&step)) {
        const ModuleId m = phys(dk->module);
        ModuleNode* self = g.find(dk->module);
        const ModuleNode* target = g.find(dk->target);
        const Pose2 dock = dock_pose(*target, dk->target_face, self->kind, dk->face);
        const Index3 n = face_normal(*target, dk->target_face);
        const Vec2 normal{static_cast<double>(n.x), static_cast<double>(n.y)};
        const Index3 own = face_normal_local(self->kind, dk->face);
        const double direction = own.x >= 0 ? 1.0 : -1.0;
        run.drive_to(m, dock.position + normal * params.standoff);
        run.align(m, dock.heading);
        log(ReconfigEventKind::Aligned, m);
        run.approach(m, dock, normal, direction);

        // Contact: connectors latch if the true pose is close to the dock pose.
        const Pose2 f = run.frame();
        ModulePose& mp = *world.module(m);
        const Vec2 ideal = f.transform(dock.position);
        const double pos_err = distance(mp.position.xy(), ideal);
        const double head_err = std::fabs(wrap_angle(mp.heading - (f.heading + dock.heading)));
        if (pos_err >= params.dock_position_tol || head_err >= params.dock_heading_tol)
          return ReconfigFailure{ReconfigFailureKind::DockMisaligned, m,
                                 "contact error " + std::to_string(pos_err) + " m, " +
                                     std::to_string(rad_to_deg(head_err)) + " deg",
                                 std::nullopt};
        mp.position = {ideal.x, ideal.y, mp.position.z};
        mp.heading = wrap_angle(f.heading + dock.heading);
        self->cell = {target->cell.x + n.x, target->cell.y + n.y, target->cell.z + n.z};
        self->yaw_quarters = static_cast<int>(std::lround(dock.heading / (kPi / 2.0)));
        g.connect({dk->target, dk->target_face, dk->module, dk->face});
        world.robot.members.insert(m);
        log(ReconfigEventKind::Docked, m);
        report.module_seconds.push_back({m, run.elapsed()});
      }
    }
  } catch (const Failed& f) {
    return f.failure;
  }

  const auto iso = find_isomorphism(g, to);
  if (!iso) return ReconfigFailure{ReconfigFailureKind::DockMisaligned, -1, "final topology does not match " + to.name(), std::nullopt};
  std::map<ModuleId, ModuleId> next_binding;
  for (const auto& [from_node, to_node] : *iso) next_binding[to_node] = phys(from_node);
  world.robot.binding = next_binding;
  world.robot.configuration = to.name();
  world.robot.members.clear();
  for (const auto& [node, m] : next_binding)
    if (m != world.robot.sensor_module) world.robot.members.insert(m);
  place_cluster(world, to);
  log(ReconfigEventKind::VerifyOk, world.robot.sensor_module);
  return report;
}

}  // namespace msrr

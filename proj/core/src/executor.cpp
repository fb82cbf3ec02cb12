#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msrr/executor.hpp"

namespace msrr {
namespace {

using nlohmann::json;

constexpr double kFootprintRadius = 0.12;
constexpr double kTrackRadius = 0.16;
constexpr int kReplanEvery = 10;
constexpr std::uint64_t kViewTimeout = 400;
constexpr std::uint64_t kNavTimeout = 3000;

struct MissionAbort {
  std::string cause;
  std::string detail;
};

struct Tracked {
  int id = 0;
  DetectedObject object;
  bool removed = false;  // picked up; no longer in the map
  bool served = false;   // handled by the mission
};

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

// Binding arguments may be phrases such as "goto pink".
std::vector<std::string> words(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    std::istringstream in(a);
    for (std::string w; in >> w;) out.push_back(w);
  }
  return out;
}

bool is_explore(const Binding& b) {
  if (b.function != "drive") return false;
  const auto w = words(b.args);
  return w.empty() || w[0] == "explore";
}

std::set<Color> interesting_colors(const MissionSpec& spec) {
  std::set<Color> out;
  for (const auto& p : spec.props) {
    const std::string& f = p.binding.function;
    if (f == "env_type_is" || f == "env-type-is") continue;
    for (const auto& a : words(p.binding.args)) {
      if (a == "explore" || a == "goto" || a == "none") continue;
      try {
        const Color c = parse_color(a);
        if (c != Color::None) out.insert(c);
      } catch (const ParseError&) {
      }
    }
  }
  return out;
}

/// Configurations reachable from `from` through plans, with their hop counts.
std::map<std::string, int> plan_hops(const std::vector<ReconfigurationPlan>& plans, const std::string& from) {
  std::map<std::string, int> hops{{from, 0}};
  std::deque<std::string> open{from};
  while (!open.empty()) {
    const std::string c = open.front();
    open.pop_front();
    for (const auto& p : plans)
      if (p.from == c && hops.emplace(p.to, hops.at(c) + 1).second) open.push_back(p.to);
  }
  return hops;
}

/// Shortest chain of plans from one configuration to another.
std::vector<const ReconfigurationPlan*> plan_chain(const std::vector<ReconfigurationPlan>& plans,
                                                   const std::string& from, const std::string& to) {
  std::map<std::string, const ReconfigurationPlan*> via;
  std::deque<std::string> open{from};
  std::set<std::string> seen{from};
  while (!open.empty()) {
    const std::string c = open.front();
    open.pop_front();
    if (c == to) break;
    for (const auto& p : plans)
      if (p.from == c && seen.insert(p.to).second) {
        via[p.to] = &p;
        open.push_back(p.to);
      }
  }
  std::vector<const ReconfigurationPlan*> chain;
  if (!seen.count(to)) return chain;
  for (std::string c = to; c != from; c = via.at(c)->from) chain.push_back(via.at(c));
  std::reverse(chain.begin(), chain.end());
  return chain;
}

class Mission {
 public:
  Mission(const Scenario& scenario, const MissionSpec& spec, const Library& lib,
          const std::vector<ReconfigurationPlan>& plans, const MissionOptions& options)
      : spec_(spec),
        lib_(lib),
        plans_(plans),
        opts_(options),
        world_(make_world(scenario, lib)),
        grid_(world_.voxels.shape()),
        rng_(options.seed.value_or(scenario.seed)),
        faults_(fault_profile(scenario, options)),
        budget_(options.tick_budget.value_or(scenario.mission.tick_budget)),
        end_drive_(scenario.mission.end_drive_capable),
        colors_(interesting_colors(spec)) {
    rparams_.noise = scenario.noise;
    opts_.characterization.validate();
  }

  MissionResult run();

 private:
  static FaultProfile fault_profile(const Scenario& scenario, const MissionOptions& options) {
    FaultProfile p = options.faults.value_or(scenario.faults);
    p.validate();
    p.seed = options.seed.value_or(scenario.seed) ^ 0x9E3779B97F4A7C15ull;
    return p;
  }

  void emit(MissionEventKind kind, json payload) {
    events_.push_back({world_.tick, kind, payload.dump()});
  }

  double radius() const { return opts_.characterization.robot_radius; }
  void check_budget() const {
    if (world_.tick >= budget_) throw MissionAbort{"tick_budget", "tick budget exhausted"};
  }

  // Perception.
  void sense();
  void track(const std::vector<DetectedObject>& detections);
  Percepts percepts() const;
  Tracked* nearest_tracked(const std::vector<std::string>& args, bool pending_only);

  // Motion.
  void idle_tick();
  void move_tick(const DriveCommand& cmd);
  void ensure_drive();
  PathResult plan_to(const Waypoint& goal) const;
  void navigate_to(const Waypoint& goal);

  // Actions.
  bool explore_tick();
  bool goto_tick(const std::vector<std::string>& args);
  void run_effect(const Proposition& prop);
  void run_entry(const LibraryEntry& entry, const std::string& property, EnvironmentType env,
                 const std::optional<BehaviorTarget>& target);
  Selection select(const std::string& property, EnvironmentType env);
  void run_property(const std::string& property, EnvironmentType env, const std::optional<BehaviorTarget>& target);
  void reconfigure(const std::string& to, const std::string& property, EnvironmentType env);
  Characterization characterize_target(Tracked& t);

  const MissionSpec& spec_;
  const Library& lib_;
  const std::vector<ReconfigurationPlan>& plans_;
  MissionOptions opts_;
  WorldState world_;
  OccupancyGrid grid_;
  Rng rng_;
  FaultInjector faults_;
  ReconfigParams rparams_;
  std::uint64_t budget_;
  bool end_drive_;
  std::set<Color> colors_;

  std::vector<MissionEvent> events_;
  std::vector<Tracked> tracked_;
  std::vector<Vec3> served_positions_;
  std::optional<EnvironmentType> env_type_;
  std::map<int, EnvironmentType> reported_env_;
  bool explored_ = false;
  std::set<CandidateKey> excluded_;
  int reconfigurations_ = 0;
  double distance_ = 0.0;
  std::vector<double> unknown_fraction_;
  std::optional<double> unknown_at_completion_;

  // Continuous drive action state.
  std::optional<Path> path_;
  std::optional<CandidateKey> view_;
  std::uint64_t goal_tick_ = 0;
};

void Mission::sense() {
  integrate_frame(grid_, render_depth(world_, robot_sensor_pose(world_)));
  if (world_.robot.z == 0.0) mark_free_disc(grid_, world_.robot.base.position, kFootprintRadius, kRobotSlabLayers);
  track(detect_objects(grid_, colors_));
}

void Mission::track(const std::vector<DetectedObject>& detections) {
  for (const auto& d : detections) {
    const bool at_served = std::any_of(served_positions_.begin(), served_positions_.end(), [&](Vec3 p) {
      return (p.xy() - d.centroid.xy()).norm() <= kTrackRadius;
    });
    Tracked* match = nullptr;
    for (auto& t : tracked_)
      if (!t.removed && t.object.color == d.color && (t.object.centroid - d.centroid).norm() <= kTrackRadius) {
        match = &t;
        break;
      }
    if (match) {
      match->object = d;
      continue;
    }
    if (at_served) continue;
    Tracked t{static_cast<int>(tracked_.size()), d};
    tracked_.push_back(t);
    emit(MissionEventKind::ObjectDetected, {{"object", t.id},
                                            {"color", std::string(to_string(d.color))},
                                            {"centroid", vec_json(d.centroid)},
                                            {"height", d.height_above_ground}});
  }
}

Percepts Mission::percepts() const {
  Percepts p;
  for (const auto& t : tracked_) {
    if (t.removed) continue;
    p.detections.push_back(t.object);
    if (!t.served) p.pending_colors.insert(t.object.color);
  }
  p.characterization = env_type_;
  p.carrying = std::any_of(world_.objects.begin(), world_.objects.end(),
                           [](const TaskObject& o) { return o.carried_by.has_value(); });
  p.exploration_done = explored_;
  return p;
}

Tracked* Mission::nearest_tracked(const std::vector<std::string>& args, bool pending_only) {
  std::set<Color> wanted;
  for (const auto& a : words(args))
    if (a != "goto" && a != "explore") wanted.insert(parse_color(a));
  const GridShape& shape = grid_.shape();
  const auto trav = traversable_columns(project_slab(grid_), shape.resolution, opts_.characterization.robot_radius);
  auto t2 = trav;
  const Index2 start = shape.column_of(world_.robot.base.position);
  if (shape.contains(start)) t2[start] = 1;
  const auto dist = path_distances(t2, start, shape.resolution);
  Tracked* best = nullptr;
  double best_cost = kUnreachable;
  for (auto& t : tracked_) {
    if (t.removed || (pending_only && t.served) || !wanted.count(t.object.color)) continue;
    // Cost: path distance to the closest reachable column near the object, else straight-line distance.
    double cost = kUnreachable;
    const Index2 oc = shape.column_of(t.object.centroid.xy());
    const int r = static_cast<int>(std::ceil(0.5 / shape.resolution));
    for (int y = oc.y - r; y <= oc.y + r; ++y)
      for (int x = oc.x - r; x <= oc.x + r; ++x)
        if (shape.contains(Index2{x, y})) cost = std::min(cost, dist[{x, y}]);
    if (cost == kUnreachable) cost = 1e6 + (t.object.centroid.xy() - world_.robot.base.position).norm();
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best = &t;
    }
  }
  return best;
}

void Mission::idle_tick() {
  step_world(world_, {}, kTickSeconds);
  if (world_.tick % static_cast<std::uint64_t>(opts_.sense_every) == 0) sense();
}

void Mission::move_tick(const DriveCommand& cmd) {
  const Vec2 before = world_.robot.base.position;
  StepCommands c;
  c.cluster = BodyTwist{cmd.v, cmd.omega};
  step_world(world_, c, kTickSeconds);
  distance_ += (world_.robot.base.position - before).norm();
  if (world_.tick % static_cast<std::uint64_t>(opts_.sense_every) == 0) sense();
}

PathResult Mission::plan_to(const Waypoint& goal) const {
  const GridShape& shape = grid_.shape();
  const Vec2 start = world_.robot.base.position;
  const auto trav = traversable_columns(project_slab(grid_), shape.resolution, radius());
  const Index2 g = shape.column_of(goal.position);
  if (shape.contains(g) && trav[g]) return plan_path(grid_, start, goal, radius());
  // Staging cells may hug an obstacle: plan to the nearest bloated-free cell, then creep in.
  auto t2 = trav;
  const Index2 s = shape.column_of(start);
  if (!shape.contains(s)) return Unreachable{"robot is outside the map"};
  t2[s] = 1;
  const auto dist = path_distances(t2, s, shape.resolution);
  std::optional<Index2> best;
  double best_d = 0.4;
  for (int y = 0; y < shape.ny; ++y)
    for (int x = 0; x < shape.nx; ++x) {
      if (!trav[{x, y}] || dist[{x, y}] == kUnreachable) continue;
      const double d = distance(shape.center(Index2{x, y}), goal.position);
      if (d < best_d - 1e-9) {
        best_d = d;
        best = Index2{x, y};
      }
    }
  if (!best) return Unreachable{"no collision-free cell near the goal"};
  auto r = plan_path(grid_, start, {shape.center(*best), std::nullopt}, radius());
  if (auto* p = std::get_if<Path>(&r)) p->push_back(goal);
  return r;
}

void Mission::ensure_drive() {
  for (const auto& e : lib_.entries_for_configuration(world_.robot.configuration))
    if (e.properties.count("drive") && e.environments.count(EnvironmentType::Free)) return;
  const Selection sel = select("drive", EnvironmentType::Free);
  reconfigure(sel.entry.configuration, "drive", EnvironmentType::Free);
}

void Mission::navigate_to(const Waypoint& goal) {
  ensure_drive();
  auto r = plan_to(goal);
  if (auto* u = std::get_if<Unreachable>(&r)) throw MissionAbort{"navigation", u->reason};
  Path path = std::get<Path>(r);
  const std::uint64_t start = world_.tick;
  while (!path_done(path, world_.robot.base, opts_.nav)) {
    check_budget();
    if (world_.tick - start > kNavTimeout) throw MissionAbort{"navigation", "timed out approaching the goal"};
    move_tick(follow_path(path, world_.robot.base, opts_.nav));
    if ((world_.tick - start) % kReplanEvery == 0) {
      r = plan_to(goal);
      if (auto* p = std::get_if<Path>(&r)) path = *p;
    }
  }
}

bool Mission::explore_tick() {
  if (explored_) return true;
  ensure_drive();
  while (!path_) {
    std::variant<ViewCandidate, ExplorationComplete> nbv = ExplorationComplete{};
    try {
      nbv = next_best_view(grid_, world_.sensor, radius(), world_.robot.base, opts_.nbv, excluded_);
    } catch (const NoReachableCandidate&) {
    }
    if (std::holds_alternative<ExplorationComplete>(nbv)) {
      explored_ = true;
      unknown_at_completion_ = reachable_unknown_fraction(world_, grid_, radius());
      return true;
    }
    const auto& cand = std::get<ViewCandidate>(nbv);
    unknown_fraction_.push_back(reachable_unknown_fraction(world_, grid_, radius()));
    view_ = CandidateKey{cand.cell, cand.heading_index};
    auto r = plan_path(grid_, world_.robot.base.position, {cand.pose.position, cand.pose.heading}, radius());
    if (auto* p = std::get_if<Path>(&r)) {
      path_ = *p;
      goal_tick_ = world_.tick;
    } else {
      excluded_.insert(*view_);
    }
  }
  if (path_done(*path_, world_.robot.base, opts_.nav) || world_.tick - goal_tick_ > kViewTimeout) {
    excluded_.insert(*view_);
    path_.reset();
    idle_tick();
    return false;
  }
  move_tick(follow_path(*path_, world_.robot.base, opts_.nav));
  if ((world_.tick - goal_tick_) % kReplanEvery == 0) {
    const Waypoint goal = path_->back();
    const SensorPose view{{goal.position.x, goal.position.y, world_.sensor.mount_height}, *goal.heading,
                          world_.sensor.pitch};
    auto r = plan_path(grid_, world_.robot.base.position, goal, radius());
    if (std::holds_alternative<Unreachable>(r)) {
      excluded_.insert(*view_);
      path_.reset();
    } else if (view_gain(grid_, world_.sensor, view, opts_.nbv.ray_stride) < opts_.nbv.gain_min) {
      path_.reset();
    } else {
      path_ = std::get<Path>(r);
    }
  }
  return false;
}

bool Mission::goto_tick(const std::vector<std::string>& args) {
  if (!path_) {
    Tracked* t = nearest_tracked(args, false);
    if (!t) throw MissionAbort{"perception", "no detected object to drive to"};
    const Characterization ch = characterize_target(*t);
    ensure_drive();
    auto r = plan_to({ch.staging_waypoint.position, ch.staging_waypoint.heading});
    if (auto* u = std::get_if<Unreachable>(&r)) throw MissionAbort{"navigation", u->reason};
    path_ = std::get<Path>(r);
    goal_tick_ = world_.tick;
  }
  if (path_done(*path_, world_.robot.base, opts_.nav)) {
    path_.reset();
    return true;
  }
  if (world_.tick - goal_tick_ > kNavTimeout) throw MissionAbort{"navigation", "timed out driving to the object"};
  move_tick(follow_path(*path_, world_.robot.base, opts_.nav));
  if ((world_.tick - goal_tick_) % kReplanEvery == 0) {
    auto r = plan_to(path_->back());
    if (auto* p = std::get_if<Path>(&r)) path_ = *p;
  }
  return false;
}

Characterization Mission::characterize_target(Tracked& t) {
  Characterization ch;
  try {
    ch = characterize(grid_, t.object, world_.robot.base, opts_.characterization);
  } catch (const NoReachablePoint& e) {
    throw MissionAbort{"perception", e.what()};
  }
  env_type_ = ch.env_type;
  auto it = reported_env_.find(t.id);
  if (it == reported_env_.end() || it->second != ch.env_type) {
    reported_env_[t.id] = ch.env_type;
    const Pose2& q = ch.staging_waypoint;
    emit(MissionEventKind::Characterized, {{"object", t.id},
                                           {"color", std::string(to_string(t.object.color))},
                                           {"env", std::string(to_string(ch.env_type))},
                                           {"distance", ch.closest_reachable_distance},
                                           {"waypoint", json::array({q.position.x, q.position.y, q.heading})}});
  }
  return ch;
}

void Mission::reconfigure(const std::string& to, const std::string& property, EnvironmentType env) {
  const auto chain = plan_chain(plans_, world_.robot.configuration, to);
  if (chain.empty())
    throw MissionAbort{"reconfiguration", "no plan from " + world_.robot.configuration + " to " + to};
  for (const ReconfigurationPlan* plan : chain) {
    emit(MissionEventKind::ReconfigStarted,
         {{"from", plan->from},
          {"to", plan->to},
          {"plan", plan->name},
          {"demand", {{"property", property}, {"env", std::string(to_string(env))}}}});
    const std::uint64_t start = world_.tick;
    const auto outcome = execute_plan(*plan, world_, lib_, rparams_, rng_, &faults_);
    if (const auto* f = std::get_if<ReconfigFailure>(&outcome))
      throw MissionAbort{f->fault ? std::string(to_string(*f->fault)) : "reconfiguration",
                         std::string(to_string(f->kind)) + ": " + f->detail};
    ++reconfigurations_;
    json modules = json::array();
    for (const auto& [id, secs] : std::get<ReconfigReport>(outcome).module_seconds)
      modules.push_back({{"module", id}, {"seconds", secs}});
    emit(MissionEventKind::ReconfigDone, {{"from", plan->from},
                                          {"to", plan->to},
                                          {"plan", plan->name},
                                          {"ticks", world_.tick - start},
                                          {"modules", modules}});
    sense();
    check_budget();
  }
}

void Mission::run_entry(const LibraryEntry& entry, const std::string& property, EnvironmentType env,
                        const std::optional<BehaviorTarget>& target) {
  emit(MissionEventKind::BehaviorStarted, {{"entry", entry.label()},
                                           {"property", property},
                                           {"env", std::string(to_string(env))},
                                           {"configuration", entry.configuration}});
  if (auto f = faults_.roll())
    throw MissionAbort{std::string(to_string(*f)), entry.label() + " interrupted by an injected fault"};

  const Behavior& b = entry.behavior;
  const int ticks = static_cast<int>(std::ceil(b.duration_s / kTickSeconds - 1e-9));
  for (int k = 0; k < ticks; ++k) {
    check_budget();
    const double t = k * kTickSeconds;
    std::map<std::pair<ModuleId, std::string>, double> setpoint;
    for (const auto& s : b.script)
      if (s.time_s <= t + 1e-9) setpoint[{s.module, s.joint}] = s.value;
    StepCommands cmd;
    for (const auto& [key, value] : setpoint) {
      const ModuleId physical = world_.robot.binding.at(key.first);
      const ModulePose* m = world_.module(physical);
      const auto rate = [&](Joint j) { return std::clamp((value - m->joints[j]) / kTickSeconds, -2.0, 2.0); };
      JointVelocities& jv = cmd.modules[physical];
      if (key.second == "pan") jv.pan = rate(kPan);
      if (key.second == "tilt") jv.tilt = rate(kTilt);
    }
    step_world(world_, cmd, kTickSeconds);
  }
  if (b.kind == BehaviorKind::Effect)
    if (auto failure = apply_behavior_effect(world_, entry, env, target))
      throw MissionAbort{"behavior", std::string(to_string(failure->reason)) + ": " + failure->detail};
  emit(MissionEventKind::BehaviorDone, {{"entry", entry.label()}, {"property", property}, {"result", "success"}});
}

Selection Mission::select(const std::string& property, EnvironmentType env) {
  // Random choice among the candidates needing the fewest reconfigurations.
  const auto hops = plan_hops(plans_, world_.robot.configuration);
  int fewest = std::numeric_limits<int>::max();
  for (const auto& e : lib_.query(property, env))
    if (auto it = hops.find(e.configuration); it != hops.end()) fewest = std::min(fewest, it->second);
  std::set<std::string> nearest;
  for (const auto& [config, n] : hops)
    if (n == fewest) nearest.insert(config);
  try {
    if (nearest.empty()) throw NoCapableEntry(property, env);
    return select_behavior(lib_, property, env, world_.robot.configuration, rng_, nearest);
  } catch (const NoCapableEntry& e) {
    throw MissionAbort{"no_capable_entry", e.what()};
  }
}

void Mission::run_property(const std::string& property, EnvironmentType env,
                           const std::optional<BehaviorTarget>& target) {
  const Selection sel = select(property, env);
  if (sel.reconfigure) reconfigure(sel.entry.configuration, property, env);
  run_entry(sel.entry, property, env, target);
}

void Mission::run_effect(const Proposition& prop) {
  const std::string& property = prop.binding.function;
  const bool pick = property == "pickUp";
  EnvironmentType env = EnvironmentType::Free;
  std::optional<BehaviorTarget> target;
  Tracked* t = nullptr;
  int tracked_id = -1;
  if (!prop.binding.args.empty()) {
    t = nearest_tracked(prop.binding.args, pick);
    if (!t) throw MissionAbort{"perception", "no detected target for " + prop.name};
    tracked_id = t->id;
    // Re-characterize from the staging point; a closer view can move it.
    for (int attempt = 0; attempt < 3; ++attempt) {
      const Characterization ch = characterize_target(tracked_[static_cast<std::size_t>(tracked_id)]);
      env = ch.env_type;
      if (distance(ch.staging_waypoint.position, world_.robot.base.position) <= opts_.nav.arrival_tol &&
          std::fabs(wrap_angle(ch.staging_waypoint.heading - world_.robot.base.heading)) <= opts_.nav.heading_tol)
        break;
      navigate_to({ch.staging_waypoint.position, ch.staging_waypoint.heading});
    }
    t = &tracked_[static_cast<std::size_t>(tracked_id)];
    target = BehaviorTarget{t->object.centroid, t->object.color};
  }

  const auto held = std::find_if(world_.objects.begin(), world_.objects.end(),
                                 [](const TaskObject& o) { return o.carried_by.has_value(); });
  const std::string held_id = held == world_.objects.end() ? "" : held->id;

  if (env == EnvironmentType::Stairs && property != "climbUp" && property != "climbDown") {
    // The configuration is chosen for the task itself; it must also climb.
    const Selection sel = select(property, env);
    if (sel.reconfigure) reconfigure(sel.entry.configuration, property, env);
    run_property("climbUp", env, target);
    run_entry(sel.entry, property, env, target);
    run_property("climbDown", env, target);
  } else {
    run_property(property, env, target);
  }

  if (pick && t) {
    t = &tracked_[static_cast<std::size_t>(tracked_id)];
    t->removed = t->served = true;
    for (const Index3& c : t->object.support) grid_.clear(c);
    served_positions_.push_back(t->object.centroid);
  }
  if (!held_id.empty())
    for (const auto& o : world_.objects)
      if (o.id == held_id && !o.carried_by) served_positions_.push_back(o.position);
  sense();
}

MissionResult Mission::run() {
  MissionResult res;
  auto transition = [&](int from, int to, Valuation env, Valuation sys) {
    emit(MissionEventKind::StateTransition, {{"from", from},
                                             {"to", to},
                                             {"env", spec_.describe(env, Side::Env)},
                                             {"sys", spec_.describe(sys, Side::Sys)}});
  };
  try {
    auto outcome = synthesize(spec_);
    if (auto* u = std::get_if<Unrealizable>(&outcome)) throw MissionAbort{"unrealizable", u->reason};
    const MissionAutomaton& aut = std::get<MissionAutomaton>(outcome);
    sense();
    Valuation env = evaluate_propositions(spec_, percepts());
    auto step = aut.initial(env);
    int state = step.state;
    Valuation sys = step.sys;
    transition(-1, state, env, sys);

    const int n_env = spec_.env_count();
    std::set<int> done;
    for (;;) {
      check_budget();
      const std::uint64_t t0 = world_.tick;
      bool acted = false;
      for (int i = n_env; i < static_cast<int>(spec_.props.size()); ++i) {
        if (!(sys >> i & 1u) || done.count(i) || spec_.props[i].binding.function == "drive") continue;
        run_effect(spec_.props[i]);
        done.insert(i);
        acted = true;
      }
      if (!acted)
        for (int i = n_env; i < static_cast<int>(spec_.props.size()); ++i) {
          const Binding& b = spec_.props[i].binding;
          if (!(sys >> i & 1u) || done.count(i) || b.function != "drive") continue;
          const bool finished = is_explore(b) ? explore_tick() : goto_tick(b.args);
          if (finished) done.insert(i);
          break;
        }

      const Valuation env2 = evaluate_propositions(spec_, percepts());
      // Exploration is ongoing; goal drives and effects gate the next step.
      bool all_done = true;
      for (int i = n_env; i < static_cast<int>(spec_.props.size()); ++i)
        if ((sys >> i & 1u) && !done.count(i) && !is_explore(spec_.props[i].binding)) all_done = false;
      if (spec_.complete && all_done && spec_.complete->eval(env2 | sys, env2 | sys)) break;
      if (env2 != env || all_done) {
        const auto next = aut.advance(state, env2);
        if (next.state != state || next.sys != sys) transition(state, next.state, env2, next.sys);
        for (int i = n_env; i < static_cast<int>(spec_.props.size()); ++i)
          if ((sys >> i & 1u) && !(next.sys >> i & 1u)) {
            done.erase(i);
            if (spec_.props[i].binding.function == "drive") path_.reset();
          }
        state = next.state;
        sys = next.sys;
        env = env2;
      }
      if (world_.tick == t0) idle_tick();
    }
    if (end_drive_) ensure_drive();
    res.summary.complete = true;
    emit(MissionEventKind::MissionComplete, {{"ticks", world_.tick},
                                             {"reconfigurations", reconfigurations_},
                                             {"configuration", world_.robot.configuration}});
  } catch (const MissionAbort& a) {
    res.summary.failure = a.cause;
    emit(MissionEventKind::MissionFailed, {{"cause", a.cause}, {"detail", a.detail}});
  } catch (const AssumptionViolated& e) {
    res.summary.failure = "assumption";
    emit(MissionEventKind::MissionFailed, {{"cause", "assumption"}, {"detail", e.what()}});
  }
  res.summary.ticks = world_.tick;
  res.summary.reconfigurations = reconfigurations_;
  res.summary.distance = distance_;
  res.summary.final_configuration = world_.robot.configuration;
  res.events = std::move(events_);
  res.grid = grid_;
  res.world = world_;
  res.unknown_fraction = unknown_fraction_;
  res.unknown_at_completion = unknown_at_completion_;
  return res;
}

}  // namespace

MissionResult run_mission(const Scenario& scenario, const MissionSpec& spec, const Library& lib,
                          const std::vector<ReconfigurationPlan>& plans, const MissionOptions& options) {
  return Mission(scenario, spec, lib, plans, options).run();
}

}  // namespace msrr

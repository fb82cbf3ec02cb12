#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "map_oracle.hpp"
#include "msrr/nav.hpp"

using namespace msrr;

namespace {

OccupancyGrid cluttered(std::mt19937_64& rng, int n) {
  OccupancyGrid g(GridShape{n, n, 3, 0.08, {}});
  for (std::size_t k = 0; k < g.shape().cell_count(); ++k) g.mark_free(g.shape().unlinear(k));
  std::uniform_int_distribution<int> pos(0, n - 3);
  for (int i = 0; i < 14; ++i) {
    const int x = pos(rng);
    const int y = pos(rng);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g.mark_occupied({x + a, y + b, 0}, Color::Gray);
  }
  return g;
}

}  // namespace

TEST_CASE("A* cost equals quadratic Dijkstra on random grids") {
  std::mt19937_64 rng(1001);
  std::bernoulli_distribution open(0.72);
  std::uniform_int_distribution<int> pick(0, 31);
  int found = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Grid2<std::uint8_t> t(32, 32, 0);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) t[{x, y}] = open(rng);
    const Index2 s{pick(rng), pick(rng)};
    const Index2 g{pick(rng), pick(rng)};
    t[s] = 1;
    t[g] = 1;
    const double want = oracle::dijkstra_cost(t, s, g);
    const auto cells = astar_cells(t, s, g);
    REQUIRE(cells.has_value() == (want < kUnreachable));
    if (!cells) continue;
    ++found;
    CHECK(cell_path_cost(*cells) == doctest::Approx(want).epsilon(1e-12));
    REQUIRE(cells->front() == s);
    REQUIRE(cells->back() == g);
    for (std::size_t i = 1; i < cells->size(); ++i) {
      const Index2 a = (*cells)[i - 1];
      const Index2 b = (*cells)[i];
      REQUIRE(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) == 1);
      REQUIRE(t[b]);
      if (a.x != b.x && a.y != b.y) REQUIRE((t[{b.x, a.y}] && t[{a.x, b.y}]));
    }
  }
  CHECK(found >= 25);
}

TEST_CASE("A* handles degenerate queries") {
  Grid2<std::uint8_t> t(4, 4, 1);
  CHECK(astar_cells(t, {1, 1}, {1, 1})->size() == 1);
  t[{3, 3}] = 0;
  CHECK_FALSE(astar_cells(t, {0, 0}, {3, 3}));
  CHECK_FALSE(astar_cells(t, {0, 0}, {9, 9}));
  t[{0, 0}] = 0;
  CHECK(astar_cells(t, {0, 0}, {2, 2}));  // the start may sit inside the bloat
}

TEST_CASE("planned paths keep the robot radius clear of obstacles") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 2.4);
  const double radius = 0.12;
  int planned = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid g = cluttered(rng, 32);
    const Vec2 s{u(rng), u(rng)};
    const Waypoint goal{{u(rng), u(rng)}, std::nullopt};
    const auto r = plan_path(g, s, goal, radius);
    if (!std::holds_alternative<Path>(r)) continue;
    ++planned;
    const Path& p = std::get<Path>(r);
    CHECK(p.back().position == goal.position);
    for (const auto& w : p)
      for (std::size_t k = 0; k < g.shape().cell_count(); ++k) {
        const Index3 c = g.shape().unlinear(k);
        if (g.state(c) != CellState::Occupied) continue;
        REQUIRE(distance(w.position, g.shape().center(Index2{c.x, c.y})) >= radius - 1e-9);
      }
  }
  CHECK(planned >= 15);
}

TEST_CASE("plan_path reports why it cannot plan") {
  OccupancyGrid g(GridShape{10, 10, 3, 0.08, {}});
  CHECK(std::holds_alternative<Unreachable>(plan_path(g, {0.4, 0.4}, {{0.6, 0.6}, {}}, 0.12)));
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 10; ++y) g.mark_free({x, y, 0});
  // Unknown columns block planning.
  CHECK(std::holds_alternative<Unreachable>(plan_path(g, {0.2, 0.4}, {{0.6, 0.4}, {}}, 0.0)));
  CHECK(std::holds_alternative<Path>(plan_path(g, {0.2, 0.2}, {{0.2, 0.7}, {}}, 0.0)));
  g.mark_occupied({1, 5, 0}, Color::Gray);
  const auto r = plan_path(g, {0.2, 0.2}, {{0.12, 0.44}, {}}, 0.12);
  REQUIRE(std::holds_alternative<Unreachable>(r));
  CHECK(std::get<Unreachable>(r).reason.find("goal") != std::string::npos);
}

TEST_CASE("pure pursuit commands stay within limits") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const NavParams p;
  for (int i = 0; i < 500; ++i) {
    const Path path{{{u(rng), u(rng)}, {}}, {{u(rng), u(rng)}, u(rng) * kPi}};
    const Pose2 pose{{u(rng), u(rng)}, u(rng) * kPi};
    const DriveCommand c = follow_path(path, pose, p);
    REQUIRE(c.v >= 0.0);
    REQUIRE(c.v <= p.v_max + 1e-12);
    REQUIRE(std::fabs(c.omega) <= p.omega_max + 1e-12);
  }
  CHECK(follow_path({}, {}, p).v == 0.0);
}

TEST_CASE("following a planned path reaches the goal pose") {
  WorldState w = fixture::world("open_floor");
  OccupancyGrid g(w.voxels.shape());
  for (std::size_t k = 0; k < g.shape().cell_count(); ++k) {
    const Index3 c = g.shape().unlinear(k);
    if (auto col = solid_at(w, c))
      g.mark_occupied(c, *col);
    else
      g.mark_free(c);
  }
  const Waypoint goal{{1.8, 1.6}, kPi / 2.0};
  const auto r = plan_path(g, w.robot.base.position, goal, 0.12);
  REQUIRE(std::holds_alternative<Path>(r));
  const Path& path = std::get<Path>(r);
  int ticks = 0;
  while (!path_done(path, w.robot.base) && ticks < 600) {
    const DriveCommand c = follow_path(path, w.robot.base);
    StepCommands cmd;
    cmd.cluster = BodyTwist{c.v, c.omega};
    step_world(w, cmd, kTickSeconds);
    ++ticks;
  }
  CHECK(ticks < 600);
  CHECK(distance(w.robot.base.position, goal.position) <= NavParams{}.arrival_tol);
  CHECK(std::fabs(wrap_angle(w.robot.base.heading - *goal.heading)) <= NavParams{}.heading_tol);
}

TEST_CASE("wheel speeds invert the differential-drive model") {
  const DriveCommand c{0.1, 0.4};
  const auto [l, r] = to_wheel_speeds(c, kTrackWidth, kWheelRadius);
  CHECK(kWheelRadius * (l + r) / 2.0 == doctest::Approx(c.v));
  CHECK(kWheelRadius * (r - l) / kTrackWidth == doctest::Approx(c.omega));
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "fixtures.hpp"
#include "map_oracle.hpp"
#include "msrr/mapping.hpp"

using namespace msrr;

namespace {

OccupancyGrid random_belief(std::mt19937_64& rng, int n, int nz, double p_free) {
  OccupancyGrid g(GridShape{n, n, nz, 0.08, {}});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> col(1, 3);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < nz; ++z) {
        const double r = u(rng);
        if (r < p_free)
          g.mark_free({x, y, z});
        else if (r < p_free + 0.08)
          g.mark_occupied({x, y, z}, static_cast<Color>(col(rng)));
      }
  return g;
}

}  // namespace

TEST_CASE("a frame marks cells before each hit free and the hit cell occupied") {
  WorldState s = fixture::empty_world(20, 20, 6, {0.2, 0.8});
  for (int y = 0; y < 20; ++y)
    for (int z = 0; z < 6; ++z) s.voxels[Index3{8, y, z}] = {true, Color::Blue};
  OccupancyGrid g(s.voxels.shape());
  const SensorFrame f = render_depth(s, robot_sensor_pose(s));
  integrate_frame(g, f);
  for (const auto& r : f.rays) {
    if (!r.hit) continue;
    const Vec3 end = f.pose.position + r.direction * (r.range + 1e-6);
    const Index3 c = g.shape().cell_of(end);
    CHECK(g.state(c) == CellState::Occupied);
    const Index3 before = g.shape().cell_of(f.pose.position + r.direction * (r.range * 0.5));
    CHECK(g.state(before) == CellState::Free);
  }
  for (int x = 9; x < 20; ++x)
    for (int y = 0; y < 20; ++y)
      for (int z = 0; z < 6; ++z) REQUIRE(g.state({x, y, z}) == CellState::Unknown);
  CHECK(g[Index3{8, 10, 0}].color == Color::Blue);
}

TEST_CASE("occupied cells are sticky and keep their first color") {
  OccupancyGrid g(GridShape{4, 4, 2, 0.08, {}});
  g.mark_occupied({1, 1, 0}, Color::Pink);
  g.mark_free({1, 1, 0});
  g.mark_occupied({1, 1, 0}, Color::Gray);
  CHECK(g[Index3{1, 1, 0}] == MapCell{CellState::Occupied, Color::Pink});
  g.clear({1, 1, 0});
  CHECK(g.state({1, 1, 0}) == CellState::Free);
  CHECK(g.count(CellState::Unknown) == 31);
}

TEST_CASE("integrating frames never creates unknown cells or frees occupied ones") {
  WorldState s = fixture::world("demo1");
  OccupancyGrid g(s.voxels.shape());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::size_t unknown = g.count(CellState::Unknown);
  for (int i = 0; i < 12; ++i) {
    const OccupancyGrid prev = g;
    SensorPose p = robot_sensor_pose(s);
    p.yaw = u(rng);
    integrate_frame(g, render_depth(s, p));
    REQUIRE(g.count(CellState::Unknown) <= unknown);
    unknown = g.count(CellState::Unknown);
    for (std::size_t k = 0; k < g.data().size(); ++k) {
      if (prev.data()[k].state == CellState::Occupied) REQUIRE(g.data()[k] == prev.data()[k]);
      if (prev.data()[k].state != CellState::Unknown) REQUIRE(g.data()[k].state != CellState::Unknown);
    }
  }
  CHECK(unknown < s.voxels.shape().cell_count());
}

TEST_CASE("every occupied cell of the truth grid matches what the belief says") {
  WorldState s = fixture::world("demo3");
  OccupancyGrid g(s.voxels.shape());
  for (int h = 0; h < 8; ++h) {
    SensorPose p = robot_sensor_pose(s);
    p.yaw = h * kPi / 4.0;
    integrate_frame(g, render_depth(s, p));
  }
  for (std::size_t k = 0; k < g.data().size(); ++k) {
    const Index3 c = g.shape().unlinear(k);
    const auto truth = solid_at(s, c);
    if (g.data()[k].state == CellState::Occupied) {
      REQUIRE(truth);
      CHECK(*truth == g.data()[k].color);
    }
    if (g.data()[k].state == CellState::Free) REQUIRE_FALSE(truth);
  }
}

TEST_CASE("detections partition the occupied cells of the requested colors") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid g = random_belief(rng, 10, 4, 0.0);
    const std::set<Color> wanted{Color::Pink, Color::Green};
    const auto objs = detect_objects(g, wanted);
    std::map<Index3, int> owner;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const auto& o = objs[i];
      REQUIRE_FALSE(o.support.empty());
      Vec3 sum;
      for (const auto& c : o.support) {
        REQUIRE(g[c].state == CellState::Occupied);
        REQUIRE(g[c].color == o.color);
        REQUIRE(owner.emplace(c, static_cast<int>(i)).second);
        sum = sum + g.shape().center(c);
      }
      CHECK((o.centroid - sum * (1.0 / o.support.size())).norm() == doctest::Approx(0.0));
      // Flood fill inside the support reaches every cell.
      std::set<Index3> in(o.support.begin(), o.support.end());
      std::set<Index3> reached{o.support[0]};
      std::vector<Index3> open{o.support[0]};
      while (!open.empty()) {
        const Index3 c = open.back();
        open.pop_back();
        for (const Index3 d : {Index3{1, 0, 0}, Index3{-1, 0, 0}, Index3{0, 1, 0}, Index3{0, -1, 0}, Index3{0, 0, 1},
                               Index3{0, 0, -1}}) {
          const Index3 n{c.x + d.x, c.y + d.y, c.z + d.z};
          if (in.count(n) && reached.insert(n).second) open.push_back(n);
        }
      }
      CHECK(reached.size() == in.size());
    }
    std::size_t expected = 0;
    for (const auto& c : g.data()) expected += c.state == CellState::Occupied && wanted.count(c.color);
    CHECK(owner.size() == expected);
    // Maximality: no two same-colored neighbors in different components.
    for (const auto& [c, i] : owner)
      for (const auto& [n, j] : owner)
        if (i != j && objs[i].color == objs[j].color)
          REQUIRE(std::abs(c.x - n.x) + std::abs(c.y - n.y) + std::abs(c.z - n.z) != 1);
    for (std::size_t i = 1; i < objs.size(); ++i) CHECK(objs[i - 1].color <= objs[i].color);
  }
}

TEST_CASE("traversable columns keep the robot radius clear of every obstacle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = random_belief(rng, 14, 3, 0.85);
    const auto slab = project_slab(g);
    for (int x = 0; x < 14; ++x)
      for (int y = 0; y < 14; ++y) {
        bool occ = false;
        for (int z = 0; z < kRobotSlabLayers; ++z) occ = occ || g.state({x, y, z}) == CellState::Occupied;
        const CellState want = occ ? CellState::Occupied
                                   : (g.state({x, y, 0}) == CellState::Free ? CellState::Free : CellState::Unknown);
        REQUIRE(slab[{x, y}] == want);
      }
    const double radius = 0.12;
    const auto trav = traversable_columns(slab, 0.08, radius);
    for (int x = 0; x < 14; ++x)
      for (int y = 0; y < 14; ++y) {
        bool clear = slab[{x, y}] == CellState::Free;
        for (int a = 0; a < 14 && clear; ++a)
          for (int b = 0; b < 14 && clear; ++b)
            if (slab[{a, b}] == CellState::Occupied &&
                distance(g.shape().center(Index2{a, b}), g.shape().center(Index2{x, y})) < radius - 1e-9)
              clear = false;
        REQUIRE(static_cast<bool>(trav[{x, y}]) == clear);
      }
  }
}

TEST_CASE("path distances equal a Bellman-Ford fixed point") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> pick(0, 15);
  for (int trial = 0; trial < 30; ++trial) {
    Grid2<std::uint8_t> t(16, 16, 0);
    std::bernoulli_distribution open(0.7);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) t[{x, y}] = open(rng);
    const Index2 s{pick(rng), pick(rng)};
    t[s] = 1;
    const auto a = path_distances(t, s, 0.08);
    const auto b = oracle::bellman_ford(t, s, 0.08);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        if (b[{x, y}] == kUnreachable)
          REQUIRE(a[{x, y}] == kUnreachable);
        else
          REQUIRE(a[{x, y}] == doctest::Approx(b[{x, y}]).epsilon(1e-12));
      }
  }
}

TEST_CASE("view gain counts unknown cells up to the first occupied one") {
  std::mt19937_64 rng(2);
  SensorModel m;
  m.max_range = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    const OccupancyGrid g = random_belief(rng, 16, 4, 0.5);
    const SensorPose p{{0.64 + 0.01 * trial, 0.6, m.mount_height}, 0.3 * trial, m.pitch};
    CHECK(view_gain(g, m, p, 4) == oracle::view_gain(g, m, p, 4));
  }
}

TEST_CASE("next best view is the exhaustive argmax under gain, distance, then index order") {
  std::mt19937_64 rng(44);
  SensorModel m;
  m.max_range = 1.0;
  int compared = 0;
  for (int trial = 0; trial < 6; ++trial) {
    OccupancyGrid g = random_belief(rng, 16, 4, 0.55);
    for (int x = 0; x < 16; ++x)
      for (int y = 0; y < 16; ++y)
        if (x < 4 || y < 4 || (x + y) % 5 != 0)
          for (int z = 0; z < 2; ++z) g.clear({x, y, z});
    const Pose2 here{{0.2, 0.2}, 0.0};
    NbvParams params;
    params.spacing_cells = 3;
    params.headings = 4;
    const oracle::BestView best = oracle::best_view(g, m, 0.12, here, params);
    REQUIRE(best.any);
    const auto got = next_best_view(g, m, 0.12, here, params);
    if (best.gain < params.gain_min) {
      REQUIRE(std::holds_alternative<ExplorationComplete>(got));
      CHECK(std::get<ExplorationComplete>(got).best_gain == best.gain);
      continue;
    }
    REQUIRE(std::holds_alternative<ViewCandidate>(got));
    const auto& v = std::get<ViewCandidate>(got);
    CHECK(v.gain == best.gain);
    CHECK(v.cell == best.cell);
    CHECK(v.heading_index == best.heading);
    CHECK(v.path_distance == doctest::Approx(best.path_distance));
    ++compared;
  }
  CHECK(compared >= 3);
}

TEST_CASE("excluded candidates are skipped and an unseen start throws") {
  OccupancyGrid g(GridShape{12, 12, 3, 0.08, {}});
  SensorModel m;
  CHECK_THROWS_AS(next_best_view(g, m, 0.12, {{0.4, 0.4}, 0.0}), NoReachableCandidate);
  mark_free_disc(g, {0.4, 0.4}, 0.2, 2);
  const auto first = next_best_view(g, m, 0.12, {{0.4, 0.4}, 0.0});
  REQUIRE(std::holds_alternative<ViewCandidate>(first));
  const auto& a = std::get<ViewCandidate>(first);
  const auto second = next_best_view(g, m, 0.12, {{0.4, 0.4}, 0.0}, {}, {{a.cell, a.heading_index}});
  REQUIRE(std::holds_alternative<ViewCandidate>(second));
  const auto& b = std::get<ViewCandidate>(second);
  CHECK(std::make_pair(b.cell, b.heading_index) != std::make_pair(a.cell, a.heading_index));
}

TEST_CASE("a fully observed map completes exploration") {
  OccupancyGrid g(GridShape{10, 10, 3, 0.08, {}});
  for (std::size_t k = 0; k < g.shape().cell_count(); ++k) g.mark_free(g.shape().unlinear(k));
  const auto r = next_best_view(g, SensorModel{}, 0.12, {{0.4, 0.4}, 0.0});
  REQUIRE(std::holds_alternative<ExplorationComplete>(r));
  CHECK(std::get<ExplorationComplete>(r).best_gain == 0);
}

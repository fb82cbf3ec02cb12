#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "msrr/mapping.hpp"
#include "msrr/nav.hpp"
#include "msrr/scenario.hpp"
#include "msrr/synth.hpp"
#include "msrr/world.hpp"

using namespace msrr;

namespace {

std::string data(const std::string& rel) { return std::string(MSRR_DATA_DIR) + "/" + rel; }

const WorldState& demo1_world() {
  static const Library lib = load_library(data("library/default_library.json"));
  static const WorldState w = make_world(load_scenario(data("scenarios/demo1/scenario.json")), lib);
  return w;
}

void BM_RenderDepth(benchmark::State& state) {
  const WorldState& w = demo1_world();
  const SensorPose pose = robot_sensor_pose(w);
  for (auto _ : state) benchmark::DoNotOptimize(render_depth(w, pose));
  state.SetItemsProcessed(state.iterations() * w.sensor.rays_h * w.sensor.rays_v);
}
BENCHMARK(BM_RenderDepth);

void BM_IntegrateFrame(benchmark::State& state) {
  const WorldState& w = demo1_world();
  const SensorFrame frame = render_depth(w, robot_sensor_pose(w));
  const OccupancyGrid empty(w.voxels.shape());
  for (auto _ : state) benchmark::DoNotOptimize(integrated(empty, frame));
}
BENCHMARK(BM_IntegrateFrame);

void BM_NextBestView(benchmark::State& state) {
  const WorldState& w = demo1_world();
  OccupancyGrid g(w.voxels.shape());
  integrate_frame(g, render_depth(w, robot_sensor_pose(w)));
  mark_free_disc(g, w.robot.base.position, 0.12, kRobotSlabLayers);
  for (auto _ : state) benchmark::DoNotOptimize(next_best_view(g, w.sensor, 0.12, w.robot.base, NbvParams{}));
}
BENCHMARK(BM_NextBestView)->Unit(benchmark::kMillisecond);

void BM_AStar(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::bernoulli_distribution open(0.75);
  Grid2<std::uint8_t> t(n, n, 0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) t[{x, y}] = open(rng);
  t[{0, 0}] = 1;
  t[{n - 1, n - 1}] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(astar_cells(t, {0, 0}, {n - 1, n - 1}));
}
BENCHMARK(BM_AStar)->Arg(32)->Arg(128)->Arg(256);

void BM_Synthesize(benchmark::State& state) {
  const MissionSpec spec = load_spec(data("scenarios/" + std::string(state.range(0) == 1 ? "demo1" : "demo2") +
                                          "/mission.spec"));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(spec));
}
BENCHMARK(BM_Synthesize)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();

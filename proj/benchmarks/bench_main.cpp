#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

#include "leosim/orbital.hpp"
#include "leosim/routing.hpp"
#include "leosim/topology.hpp"
#include "leosim/traffic.hpp"

using namespace leosim;

namespace {

std::vector<GroundStation> Stations() {
  return {{"New York", 40.71, -74.01, 25}, {"London", 51.51, -0.13, 25},
          {"Tokyo", 35.68, 139.69, 25},    {"Los Angeles", 34.05, -118.24, 25},
          {"Singapore", 1.35, 103.82, 25}, {"Frankfurt", 50.11, 8.68, 25}};
}

const TopologySnapshot& Starlink() {
  static const TopologySnapshot snap =
      BuildSnapshot(presets::StarlinkSim(), Stations(), 0, GridPolicy{}, CapacityProfile{});
  return snap;
}

void BM_BuildSnapshot(benchmark::State& state) {
  const auto spec = presets::ByName(state.range(0) == 0 ? "oneweb" : "starlink_sim");
  const auto stations = Stations();
  double t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildSnapshot(spec, stations, t, GridPolicy{}, CapacityProfile{}));
    t += 15;
  }
}
BENCHMARK(BM_BuildSnapshot)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KShortestPaths(benchmark::State& state) {
  const auto& snap = Starlink();
  const NodeIndex ny = snap.StationNode(0), lon = snap.StationNode(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(KShortestPaths(snap, ny, lon, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_KShortestPaths)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ProgressiveFill(benchmark::State& state) {
  const int flows = static_cast<int>(state.range(0));
  const int links = flows * 4;
  std::mt19937_64 rng(1);
  std::vector<std::vector<DirectedLinkId>> paths(flows);
  for (auto& p : paths) {
    for (int h = 0; h < 12; ++h) p.push_back(static_cast<DirectedLinkId>(rng() % links));
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  std::vector<double> offered(flows), cap(links, 400);
  std::uniform_real_distribution<double> d(10, 500);
  for (auto& o : offered) o = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ProgressiveFill(paths, offered, cap));
}
BENCHMARK(BM_ProgressiveFill)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();

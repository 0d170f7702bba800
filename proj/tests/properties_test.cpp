#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "leosim/experiments.hpp"
#include "leosim/routing.hpp"
#include "leosim/scenario.hpp"
#include "leosim/traffic.hpp"
#include "oracles.hpp"

using namespace leosim;

namespace {

// Random connected satellite mesh with `stations` ground nodes, each hung
// off one or two random satellites.
TopologySnapshot RandomNetwork(std::mt19937_64& rng, int sats, int stations, double p) {
  std::uniform_real_distribution<double> delay(1, 10), cap(100, 500);
  std::vector<fixture::Edge> edges;
  std::set<std::pair<int, int>> used;
  for (int i = 1; i < sats; ++i) {
    const int parent = static_cast<int>(rng() % i);
    used.insert({parent, i});
    edges.push_back({parent, i, delay(rng), cap(rng)});
  }
  std::bernoulli_distribution extra(p);
  for (int i = 0; i < sats; ++i) {
    for (int j = i + 1; j < sats; ++j) {
      if (extra(rng) && used.insert({i, j}).second) edges.push_back({i, j, delay(rng), cap(rng)});
    }
  }
  for (int g = 0; g < stations; ++g) {
    const int a = static_cast<int>(rng() % sats);
    edges.push_back({a, sats + g, delay(rng), cap(rng)});
    const int b = static_cast<int>(rng() % sats);
    if (b != a && rng() % 2) edges.push_back({b, sats + g, delay(rng), cap(rng)});
  }
  return fixture::Graph(sats, stations, edges);
}

std::vector<FlowDemand> RandomDemands(std::mt19937_64& rng, int stations, int n) {
  std::uniform_real_distribution<double> rate(10, 300);
  std::vector<FlowDemand> d;
  for (int i = 0; i < n; ++i) {
    const int s = static_cast<int>(rng() % stations);
    int t = static_cast<int>(rng() % (stations - 1));
    if (t >= s) ++t;
    d.push_back(fixture::Demand(i, s, t, rate(rng)));
  }
  return d;
}

void ExpectValidPath(const TopologySnapshot& snap, const AssignedFlow& f) {
  ASSERT_GE(f.path.nodes.size(), 2u);
  EXPECT_EQ(f.path.nodes.front(), snap.StationNode(f.demand.src));
  EXPECT_EQ(f.path.nodes.back(), snap.StationNode(f.demand.dst));
  std::set<NodeIndex> seen(f.path.nodes.begin(), f.path.nodes.end());
  EXPECT_EQ(seen.size(), f.path.nodes.size()) << "loop";
  double delay = 0;
  for (std::size_t i = 0; i + 1 < f.path.nodes.size(); ++i) {
    const auto l = snap.FindLink(f.path.nodes[i], f.path.nodes[i + 1]);
    ASSERT_TRUE(l.has_value());
    delay += snap.link(*l).delay_ms;
  }
  EXPECT_NEAR(delay, f.path.total_delay_ms, 1e-9);
}

const char* kSmall = R"(
constellation:
  shells:
    - {altitude_km: 550, inclination_deg: 53, num_planes: 12, sats_per_plane: 16, phasing_factor: 1}
stations: {file: ../cities.csv, min_elevation_deg: 10}
traffic: {total_rate: 6000, pair_policy: inter_region_ring, partners: 2}
)";

ScenarioConfig Small(const std::vector<std::string>& overrides = {}) {
  return ParseScenario(kSmall, LEOSIM_DATA_DIR "/scenarios", overrides);
}

}  // namespace

TEST(Property, KspPrefixStable) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = RandomNetwork(rng, 8 + trial % 5, 2, 0.4);
    const NodeIndex s = g.StationNode(0), t = g.StationNode(1);
    const auto deep = KShortestPaths(g, s, t, 12);
    for (int k = 1; k <= 12; ++k) {
      const auto shallow = KShortestPaths(g, s, t, k);
      ASSERT_LE(shallow.size(), deep.size());
      for (std::size_t i = 0; i < shallow.size(); ++i) {
        EXPECT_EQ(shallow[i].nodes, deep[i].nodes) << trial << " k=" << k;
      }
    }
  }
}

TEST(Property, EquivalentPathsGrowWithEpsilon) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = RandomNetwork(rng, 10, 2, 0.5);
    const auto paths = KShortestPaths(g, g.StationNode(0), g.StationNode(1), 15);
    std::size_t prev = 0;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
      const auto ep = EquivalentPaths(paths, eps);
      EXPECT_GE(ep.size(), std::max<std::size_t>(prev, 1));
      for (std::size_t i = 0; i < ep.size(); ++i) {
        EXPECT_EQ(ep[i].nodes, paths[i].nodes);
        EXPECT_LE(ep[i].total_delay_ms, (1 + eps) * paths[0].total_delay_ms + 1e-12);
      }
      prev = ep.size();
    }
  }
}

TEST(Property, MfssWithoutCongestionIsOspf) {
  // theta must stay below 1, so the congestion test is disarmed with
  // capacity instead.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = RandomNetwork(rng, 10, 4, 0.3);
    const auto d = RandomDemands(rng, 4, 12);
    std::vector<fixture::Edge> wide;
    for (const Link& l : g.links()) wide.push_back({int(l.a), int(l.b), l.delay_ms, 1e12});
    const auto big = fixture::Graph(10, 4, wide);
    MfssState s;
    const auto m = MfssAssign(big, d, s);
    const auto o = OspfAssign(big, d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(m.flows[i].path.nodes, o.flows[i].path.nodes) << trial;
    }
  }
}

TEST(Property, SchedulersProduceRealPaths) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = RandomNetwork(rng, 12, 5, 0.25);
    const auto d = RandomDemands(rng, 5, 20);
    MfssState s;
    ElbParams ep;
    ep.deflection_fraction = 1;
    ep.busy_threshold = 0.3;
    const auto b4 = B4Allocate(g, d, B4Params{});
    for (const auto& a : {OspfAssign(g, d), MfssAssign(g, d, s), ElbAssign(g, d, ep),
                          b4.assignment}) {
      ASSERT_EQ(a.flows.size(), d.size());
      for (const auto& f : a.flows) {
        ASSERT_TRUE(f.routed) << a.algorithm;
        ExpectValidPath(g, f);
      }
      const auto r = MaxMinFairThroughput(a, g);
      for (double u : r.link_utilization) EXPECT_LE(u, 1 + 1e-9);
    }
  }
}

TEST(Property, ScenarioAssignmentsUseSnapshotLinks) {
  const auto res = CompareAlgorithms(Small());
  const auto& snap = res.snapshots[0];
  for (const auto& run : res.runs) {
    ASSERT_TRUE(run.error.empty()) << run.error;
    for (const auto& f : run.assignments[0].flows) {
      if (f.routed) ExpectValidPath(snap, f);
    }
  }
}

TEST(Property, OspfIgnoresOtherSchedulerParameters) {
  const auto a = Small();
  const auto b = Small({"mfss.theta=0.3", "mfss.k=3", "seed=5", "b4.k=1"});
  const auto snap = ScenarioSnapshot(a, 0);
  const auto d = ScenarioDemands(a);
  const auto x = RunScheduler("ospf", a, snap, d, nullptr);
  const auto y = RunScheduler("ospf", b, snap, d, nullptr);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(x.flows[i].path.nodes, y.flows[i].path.nodes);
}

TEST(Property, ComparisonIsDeterministic) {
  const auto cfg = Small();
  const auto a = CompareAlgorithms(cfg);
  const auto b = CompareAlgorithms(cfg);
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    const auto& x = a.runs[r].reports[0].flows;
    const auto& y = b.runs[r].reports[0].flows;
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x[i].realized, y[i].realized);
      EXPECT_EQ(a.runs[r].assignments[0].flows[i].path.nodes,
                b.runs[r].assignments[0].flows[i].path.nodes);
    }
  }
}

TEST(Property, CachedAndUncachedAgree) {
  const auto cfg = Small();
  const auto snap = ScenarioSnapshot(cfg, 0);
  const auto d = ScenarioDemands(cfg);
  for (const auto& alg : AlgorithmNames()) {
    PathCache cache(snap, 50);
    const auto x = RunScheduler(alg, cfg, snap, d, &cache);
    const auto y = RunScheduler(alg, cfg, snap, d, nullptr);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(x.flows[i].path.nodes, y.flows[i].path.nodes) << alg;
    }
  }
}

TEST(Property, GroundLinksRespectElevationMask) {
  int checked = 0;
  for (double mask : {10.0, 25.0, 40.0}) {
    const auto cfg = Small({"stations.min_elevation_deg=" + std::to_string(mask)});
    for (double t : {0.0, 500.0}) {
      const auto snap = ScenarioSnapshot(cfg, t);
      for (const Link& l : snap.links()) {
        if (l.kind != LinkKind::kGsl) continue;
        const double e = oracle::Elevation(snap.positions[l.b], snap.positions[l.a]);
        EXPECT_GE(e, mask - 1e-9) << "t=" << t;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 0);
}

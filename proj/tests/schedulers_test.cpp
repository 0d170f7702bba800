#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "leosim/error.hpp"
#include "leosim/routing.hpp"
#include "leosim/traffic.hpp"

using namespace leosim;
using fixture::Demand;
using fixture::Graph;

namespace {

// Satellites 0 (B), 1 (C); stations A = node 2, D = node 3.
//   A - B - D and A - C - D, equal delays.
TopologySnapshot Diamond(double cap = 400) {
  return Graph(2, 2, {{2, 0, 1, cap}, {0, 3, 1, cap}, {2, 1, 1, cap}, {1, 3, 1, cap}});
}

// s0..s3 satellites, A = 4 (station 0), B = 5 (station 1).
// A-s0-s1-B is the shortest path; s2 and s3 are one-hop detours around s0-s1.
TopologySnapshot Detour() {
  return Graph(4, 2, {{4, 0, 1}, {0, 1, 1}, {1, 5, 1}, {0, 2, 1}, {2, 1, 1}, {0, 3, 1},
                      {3, 1, 1.5}});
}

std::vector<NodeIndex> N(std::initializer_list<NodeIndex> n) { return n; }

}  // namespace

TEST(Ospf, ShortestPathPerFlow) {
  const auto g = Detour();
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 10), Demand(1, 1, 0, 20)};
  const auto a = OspfAssign(g, d);
  EXPECT_EQ(a.algorithm, "ospf");
  ASSERT_EQ(a.flows.size(), 2u);
  EXPECT_EQ(a.flows[0].path.nodes, N({4, 0, 1, 5}));
  EXPECT_EQ(a.flows[1].path.nodes, N({5, 1, 0, 4}));
  EXPECT_EQ(a.flows[1].rate, 20);
  EXPECT_EQ(a.flows[1].plane, RoutingPlane::kIp);
}

TEST(Ospf, UnroutableFlowsCarryReason) {
  // station 2 exists but has no links; station 7 does not exist
  const auto g = Graph(2, 3, {{2, 0, 1}, {0, 1, 1}, {1, 3, 1}});
  const std::vector<FlowDemand> d{Demand(0, 0, 2, 5), Demand(1, 0, 7, 5), Demand(2, 0, 0, 5),
                                  Demand(3, 0, 1, 5)};
  const auto a = OspfAssign(g, d);
  ASSERT_EQ(a.flows.size(), 4u);
  int routed = 0;
  for (const auto& f : a.flows) {
    if (f.routed) {
      ++routed;
      continue;
    }
    EXPECT_FALSE(f.reason.empty());
  }
  EXPECT_EQ(routed, 1);
}

TEST(OrderDemands, SortsBySourceDestinationThenRate) {
  const std::vector<FlowDemand> d{Demand(0, 1, 0, 5), Demand(1, 0, 1, 5), Demand(2, 0, 1, 9),
                                  Demand(3, 0, 1, 9)};
  const auto o = OrderDemands(d);
  EXPECT_EQ(o[0].id, 2u);
  EXPECT_EQ(o[1].id, 3u);
  EXPECT_EQ(o[2].id, 1u);
  EXPECT_EQ(o[3].id, 0u);
}

TEST(DetectCongestion, AllZeroLoads) {
  MfssState s;
  LinkLoadMap loads(4);
  const std::vector<double> caps(4, 400);
  EXPECT_TRUE(DetectCongestion(s, loads, caps).empty());
}

TEST(DetectCongestion, DirectThreshold) {
  MfssParams p;
  p.alpha = 1;
  p.theta = 0.7;
  MfssState s(p);
  LinkLoadMap loads(2);
  loads.Add(1, 360);
  const std::vector<double> caps(2, 400);
  EXPECT_EQ(DetectCongestion(s, loads, caps), (std::vector<DirectedLinkId>{1}));
}

TEST(DetectCongestion, EwmaSequence) {
  MfssParams p;
  p.alpha = 0.5;
  p.theta = 0.5;
  MfssState s(p);
  const std::vector<double> caps{100};
  const double samples[] = {0.2, 0.4, 0.8};
  const double expected[] = {0.1, 0.25, 0.525};
  for (int i = 0; i < 3; ++i) {
    LinkLoadMap loads(1);
    loads.Add(0, samples[i] * 100);
    const auto hot = DetectCongestion(s, loads, caps);
    EXPECT_NEAR(s.ewma[0], expected[i], 1e-12);
    EXPECT_EQ(hot.empty(), i < 2);
  }
  MfssState seeded(p);
  seeded.ewma = {0.2};
  const double trace[] = {0.3, 0.55};
  for (int i = 0; i < 2; ++i) {
    LinkLoadMap loads(1);
    loads.Add(0, samples[i + 1] * 100);
    const auto hot = DetectCongestion(seeded, loads, caps);
    EXPECT_NEAR(seeded.ewma[0], trace[i], 1e-12);
    EXPECT_EQ(hot.empty(), i == 0);
  }
}

TEST(DetectCongestion, RejectsZeroCapacity) {
  MfssState s;
  LinkLoadMap loads(2);
  const std::vector<double> caps{400, 0};
  EXPECT_THROW(DetectCongestion(s, loads, caps), Error);
  const std::vector<double> wrong(3, 400);
  EXPECT_THROW(DetectCongestion(s, loads, wrong), Error);
}

TEST(DetectCongestion, MonotoneInLoads) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 500);
  const std::vector<double> caps(8, 400);
  for (int trial = 0; trial < 200; ++trial) {
    MfssState base;
    base.ewma.resize(8);
    for (auto& e : base.ewma) e = u(rng) / 500;
    LinkLoadMap lo(8), hi(8);
    for (DirectedLinkId id = 0; id < 8; ++id) {
      const double x = u(rng);
      lo.Add(id, x);
      hi.Add(id, x + (rng() % 2 ? u(rng) : 0));
    }
    MfssState a = base, b = base;
    const auto fa = DetectCongestion(a, lo, caps);
    const auto fb = DetectCongestion(b, hi, caps);
    for (DirectedLinkId id : fa) {
      EXPECT_TRUE(std::binary_search(fb.begin(), fb.end(), id)) << trial;
    }
  }
}

TEST(MfssParams, Validation) {
  MfssParams p;
  EXPECT_NO_THROW(p.Validate());
  for (double theta : {0.0, 1.0, 1.5, -0.1}) {
    MfssParams q;
    q.theta = theta;
    EXPECT_THROW(q.Validate(), Error) << theta;
  }
  MfssParams a;
  a.alpha = 0;
  EXPECT_THROW(a.Validate(), Error);
  a.alpha = 1;
  EXPECT_NO_THROW(a.Validate());
  MfssParams e;
  e.epsilon = -1;
  EXPECT_THROW(e.Validate(), Error);
  MfssParams k;
  k.k = 0;
  EXPECT_THROW(k.Validate(), Error);
}

TEST(Mfss, DiamondSecondFlowTakesOtherBranch) {
  const auto g = Diamond();
  MfssParams p;
  p.theta = 0.7;
  p.alpha = 1;
  MfssState s(p);
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 300), Demand(1, 0, 1, 300)};
  const auto a = MfssAssign(g, d, s);
  ASSERT_EQ(a.flows.size(), 2u);
  EXPECT_EQ(a.flows[0].path.nodes, N({2, 0, 3}));
  EXPECT_EQ(a.flows[0].plane, RoutingPlane::kIp);
  EXPECT_EQ(a.flows[1].path.nodes, N({2, 1, 3}));
  EXPECT_EQ(a.flows[1].plane, RoutingPlane::kAuxiliary);
  EXPECT_TRUE(s.auxiliary_active);
  const auto r = MaxMinFairThroughput(a, g);
  EXPECT_EQ(r.flows[0].realized, 300);
  EXPECT_EQ(r.flows[1].realized, 300);
}

TEST(Mfss, NoCongestionMatchesOspf) {
  const auto g = Detour();
  std::vector<FlowDemand> d;
  for (int i = 0; i < 6; ++i) d.push_back(Demand(i, i % 2, 1 - i % 2, 10 + i));
  MfssState s;
  const auto m = MfssAssign(g, d, s);
  const auto o = OspfAssign(g, d);
  ASSERT_EQ(m.flows.size(), o.flows.size());
  for (std::size_t i = 0; i < m.flows.size(); ++i) {
    EXPECT_EQ(m.flows[i].path.nodes, o.flows[i].path.nodes);
    EXPECT_EQ(m.flows[i].plane, RoutingPlane::kIp);
  }
  EXPECT_FALSE(s.auxiliary_active);
}

TEST(Mfss, AdmittedFlowsAreNeverMoved) {
  const auto g = Diamond();
  MfssParams p;
  p.alpha = 1;
  MfssState s(p);
  const std::vector<FlowDemand> first{Demand(0, 0, 1, 300)};
  const std::vector<FlowDemand> both{Demand(0, 0, 1, 300), Demand(1, 0, 1, 300)};
  MfssState s1(p);
  const auto a1 = MfssAssign(g, first, s1);
  const auto a2 = MfssAssign(g, both, s);
  EXPECT_EQ(a1.flows[0].path.nodes, a2.flows[0].path.nodes);
}

TEST(Mfss, FallsBackToLeastLoadedEquivalentPath) {
  // Both branches flagged after two flows: the third picks the lower
  // post-assignment utilization.
  const auto g = Diamond();
  MfssParams p;
  p.alpha = 1;
  p.theta = 0.2;
  p.detour_search = false;
  MfssState s(p);
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 100), Demand(1, 0, 1, 90),
                                  Demand(2, 0, 1, 50)};
  const auto a = MfssAssign(g, d, s);
  EXPECT_EQ(a.flows[0].path.nodes, N({2, 0, 3}));
  EXPECT_EQ(a.flows[1].path.nodes, N({2, 1, 3}));
  EXPECT_EQ(a.flows[2].path.nodes, N({2, 1, 3}));
  EXPECT_EQ(a.flows[2].plane, RoutingPlane::kAuxiliary);
}

TEST(Mfss, DeactivatesWhenClear) {
  // alpha = 1: the EWMA equals the last load sample
  const auto g = Diamond();
  MfssParams p;
  p.alpha = 1;
  MfssState s(p);
  MfssAssign(g, std::vector<FlowDemand>{Demand(0, 0, 1, 300)}, s);
  EXPECT_TRUE(s.auxiliary_active);
  // loads reset per call
  MfssAssign(g, std::vector<FlowDemand>{Demand(1, 0, 1, 10)}, s);
  EXPECT_FALSE(s.auxiliary_active);
  MfssParams keep = p;
  keep.deactivate_when_clear = false;
  MfssState k(keep);
  MfssAssign(g, std::vector<FlowDemand>{Demand(0, 0, 1, 300)}, k);
  MfssAssign(g, std::vector<FlowDemand>{Demand(1, 0, 1, 10)}, k);
  EXPECT_TRUE(k.auxiliary_active);
}

TEST(Mfss, DetourAvoidsFlaggedCorridor) {
  // Two equal branches through a shared hot middle link 0-1; the detour
  // 2-3 is 10% longer and outside the k = 1 equivalent set.
  //   A(4) - 0 - 1 - B(5), and A - 2 - 3 - B with slightly longer delay
  const auto g = Graph(4, 2, {{4, 0, 1}, {0, 1, 1}, {1, 5, 1}, {4, 2, 1}, {2, 3, 1.1},
                              {3, 5, 1}});
  MfssParams p;
  p.alpha = 1;
  p.k = 1;
  MfssState s(p);
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 300), Demand(1, 0, 1, 300)};
  const auto a = MfssAssign(g, d, s);
  EXPECT_EQ(a.flows[1].path.nodes, N({4, 2, 3, 5}));
  MfssParams off = p;
  off.detour_search = false;
  MfssState so(off);
  const auto b = MfssAssign(g, d, so);
  EXPECT_EQ(b.flows[1].path.nodes, N({4, 0, 1, 5}));
}

TEST(Elb, IdleNetworkMatchesShortestPath) {
  const auto g = Detour();
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 50), Demand(1, 0, 1, 50),
                                  Demand(2, 1, 0, 80)};
  const auto e = ElbAssign(g, d, ElbParams{});
  const auto o = OspfAssign(g, d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(e.flows[i].path.nodes, o.flows[i].path.nodes);
    EXPECT_EQ(e.flows[i].deflections, 0);
  }
}

TEST(Elb, HotLinkHandTrace) {
  // Five 100-unit flows A -> B share s0 -> s1 (500 offered on 400).
  // Flow 0 sees 400 without itself: busy, goes to s2 (first idle).
  // Flow 1 sees 300: busy, s0 -> s2 now carries 100, so s3 is less used.
  // Flow 2 sees 200 = 0.5: not busy, as are flows 3 and 4.
  const auto g = Detour();
  std::vector<FlowDemand> d;
  for (int i = 0; i < 5; ++i) d.push_back(Demand(i, 0, 1, 100));
  ElbParams p;
  p.deflection_fraction = 1;
  const auto e = ElbAssign(g, d, p);
  EXPECT_EQ(e.flows[0].path.nodes, N({4, 0, 2, 1, 5}));
  EXPECT_EQ(e.flows[1].path.nodes, N({4, 0, 3, 1, 5}));
  for (int i = 2; i < 5; ++i) EXPECT_EQ(e.flows[i].path.nodes, N({4, 0, 1, 5}));
  EXPECT_EQ(e.flows[0].deflections, 1);
  EXPECT_EQ(e.flows[4].deflections, 0);
}

TEST(Elb, ZeroFractionNeverDeflects) {
  const auto g = Detour();
  std::vector<FlowDemand> d;
  for (int i = 0; i < 5; ++i) d.push_back(Demand(i, 0, 1, 100));
  ElbParams p;
  p.deflection_fraction = 0;
  for (const auto& f : ElbAssign(g, d, p).flows) EXPECT_EQ(f.deflections, 0);
}

TEST(Elb, TtlOverrunFallsBackToShortestPath) {
  const auto g = Detour();
  std::vector<FlowDemand> d;
  for (int i = 0; i < 5; ++i) d.push_back(Demand(i, 0, 1, 100));
  ElbParams p;
  p.deflection_fraction = 1;
  p.ttl = 3;  // shortest path is 3 hops, every detour is 4
  for (const auto& f : ElbAssign(g, d, p).flows) {
    EXPECT_EQ(f.path.nodes, N({4, 0, 1, 5}));
    EXPECT_EQ(f.deflections, 0);
  }
}

TEST(Elb, SeedChangesOnlyWhoIsDeflected) {
  const auto g = Detour();
  std::vector<FlowDemand> d;
  for (int i = 0; i < 8; ++i) d.push_back(Demand(i, 0, 1, 100));
  ElbParams a;
  ElbParams b;
  b.seed = 99;
  const auto x = ElbAssign(g, d, a), y = ElbAssign(g, d, a), z = ElbAssign(g, d, b);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(x.flows[i].path.nodes, y.flows[i].path.nodes);
  for (const auto& f : z.flows) EXPECT_TRUE(f.routed);
}

TEST(Elb, Validation) {
  ElbParams p;
  p.busy_threshold = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.deflection_fraction = 1.5;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.ttl = 0;
  EXPECT_THROW(p.Validate(), Error);
}

TEST(B4, SingleFlowSinglePath) {
  const auto g = Graph(1, 2, {{1, 0, 1, 250}, {0, 2, 1, 400}});
  B4Params p;
  p.k = 1;
  const auto a = B4Allocate(g, std::vector<FlowDemand>{Demand(0, 0, 1, 1000)}, p);
  EXPECT_DOUBLE_EQ(a.total_rate[0], 250);
  const auto b = B4Allocate(g, std::vector<FlowDemand>{Demand(0, 0, 1, 100)}, p);
  EXPECT_DOUBLE_EQ(b.total_rate[0], 100);
}

TEST(B4, TwoFlowsShareOneLink) {
  const auto g = Graph(2, 2, {{2, 0, 1}, {0, 1, 1}, {1, 3, 1}});
  B4Params p;
  p.k = 1;
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 1000), Demand(1, 0, 1, 1000)};
  const auto a = B4Allocate(g, d, p);
  EXPECT_DOUBLE_EQ(a.total_rate[0], 200);
  EXPECT_DOUBLE_EQ(a.total_rate[1], 200);
}

TEST(B4, SplitsOverCandidates) {
  // one 400-unit demand over a diamond of 200-unit branches
  const auto g = Diamond(200);
  B4Params p;
  p.k = 2;
  const auto a = B4Allocate(g, std::vector<FlowDemand>{Demand(0, 0, 1, 400)}, p);
  ASSERT_EQ(a.split[0].size(), 2u);
  EXPECT_DOUBLE_EQ(a.split[0][0], 200);
  EXPECT_DOUBLE_EQ(a.split[0][1], 200);
  EXPECT_DOUBLE_EQ(a.total_rate[0], 400);
  EXPECT_EQ(a.assignment.flows[0].rate, 400);
  EXPECT_EQ(a.assignment.flows[0].path.nodes, N({2, 0, 3}));
}

TEST(B4, ThreeFlowsTwoLinksMatchOracle) {
  // chain X(2) - s0 - s1 - Y(3) plus Z(4) on s0 side; link capacities 300 and 500.
  // f0: X->Y crosses both, f1: X->Z(s0 only), f2: Z->Y.
  const auto g = Graph(2, 3, {{2, 0, 1, 1000}, {0, 1, 1, 300}, {1, 3, 1, 1000},
                              {0, 4, 1, 500}});
  B4Params p;
  p.k = 1;
  const std::vector<FlowDemand> d{Demand(0, 0, 1, 1000), Demand(1, 0, 2, 1000),
                                  Demand(2, 2, 1, 1000)};
  const auto a = B4Allocate(g, d, p);
  // progressive filling oracle: s0->s1 shared by f0 and f2 -> 150 each;
  // X->s0 is 1000 so f1 then rises to min(1000 - 150, 500) = 500 on s0->Z.
  std::vector<std::vector<DirectedLinkId>> links;
  for (const auto& f : a.assignment.flows) links.push_back(DirectedLinks(g, f.path));
  const auto caps = DirectedCapacities(g);
  const std::vector<double> offered(3, 1000);
  const auto oracle_rates = ProgressiveFill(links, offered, caps);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.total_rate[i], oracle_rates[i], 1e-9);
  EXPECT_NEAR(a.total_rate[0], 150, 1e-9);
  EXPECT_NEAR(a.total_rate[1], 500, 1e-9);
  EXPECT_NEAR(a.total_rate[2], 150, 1e-9);
}

TEST(B4, Validation) {
  B4Params p;
  p.k = 0;
  EXPECT_THROW(p.Validate(), Error);
  const auto g = Graph(2, 2, {{2, 0, 1}, {1, 3, 1}});
  const auto a = B4Allocate(g, std::vector<FlowDemand>{Demand(0, 0, 1, 10)}, B4Params{});
  EXPECT_FALSE(a.assignment.flows[0].routed);
  EXPECT_FALSE(a.assignment.flows[0].reason.empty());
}

#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "leosim/error.hpp"
#include "leosim/experiments.hpp"
#include "leosim/scenario.hpp"

using namespace leosim;

namespace {

ThroughputReport Report(std::vector<double> rates) {
  ThroughputReport r;
  r.algorithm = "x";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    FlowThroughput f;
    f.flow_id = i;
    f.offered = 1000;
    f.realized = rates[i];
    f.routed = rates[i] > 0;
    r.flows.push_back(f);
  }
  return r;
}

// Small shell so whole comparisons run in well under a second.
const char* kSmall = R"(
name: small
constellation:
  shells:
    - {altitude_km: 550, inclination_deg: 53, num_planes: 12, sats_per_plane: 16, phasing_factor: 1}
stations: {file: ../cities.csv, min_elevation_deg: 10}
traffic: {total_rate: 3000, pair_policy: inter_region_ring, partners: 1}
profile:
  k: 5
  pairs:
    - [New York, London]
)";

ScenarioConfig Small(const std::vector<std::string>& overrides = {}) {
  return ParseScenario(kSmall, LEOSIM_DATA_DIR "/scenarios", overrides);
}

}  // namespace

TEST(Cdf, ThreeSamples) {
  const auto c = CdfSeries::FromSamples({300, 100, 200});
  EXPECT_EQ(c.values(), (std::vector<double>{100, 200, 300}));
  EXPECT_DOUBLE_EQ(c.At(200), 2.0 / 3);
  EXPECT_DOUBLE_EQ(c.At(99), 0);
  EXPECT_DOUBLE_EQ(c.At(300), 1);
  EXPECT_DOUBLE_EQ(c.FractionBelow(200), 1.0 / 3);
  EXPECT_DOUBLE_EQ(c.FractionAbove(200), 1.0 / 3);
  EXPECT_EQ(c.sample_count(), 3u);
}

TEST(Cdf, AllEqualIsOneStep) {
  const auto c = CdfSeries::FromSamples({7, 7, 7, 7});
  EXPECT_EQ(c.values().size(), 1u);
  EXPECT_DOUBLE_EQ(c.fractions()[0], 1);
  EXPECT_DOUBLE_EQ(c.At(6.999), 0);
  EXPECT_DOUBLE_EQ(c.At(7), 1);
}

TEST(Cdf, NondecreasingAndEndsAtOne) {
  const auto c = CdfSeries::FromSamples({5, 1, 4, 1, 5, 9, 2, 6, 5, 3});
  EXPECT_TRUE(std::is_sorted(c.values().begin(), c.values().end()));
  EXPECT_TRUE(std::is_sorted(c.fractions().begin(), c.fractions().end()));
  EXPECT_DOUBLE_EQ(c.fractions().back(), 1);
}

TEST(Cdf, EmptyReportThrows) {
  EXPECT_THROW(ThroughputCdf(ThroughputReport{}), Error);
}

TEST(Cdf, UnroutedCountAsZero) {
  const auto c = ThroughputCdf(Report({0, 150, 250}));
  EXPECT_DOUBLE_EQ(c.At(0), 1.0 / 3);
}

TEST(Summarize, AgreesWithCdf) {
  const std::vector<ThroughputReport> r{Report({0, 100, 125, 130, 200, 201, 400})};
  const auto row = Summarize(r, 125, 200);
  const auto cdf = ThroughputCdf(r[0]);
  EXPECT_DOUBLE_EQ(row.fraction_below_low, cdf.FractionBelow(125));
  EXPECT_DOUBLE_EQ(row.fraction_above_high, cdf.FractionAbove(200));
  EXPECT_DOUBLE_EQ(row.fraction_below_low, 2.0 / 7);
  EXPECT_DOUBLE_EQ(row.fraction_above_high, 2.0 / 7);
  EXPECT_DOUBLE_EQ(row.median_rate, 130);
  EXPECT_EQ(row.flows, 7u);
}

TEST(Summarize, PoolsSnapshots) {
  const std::vector<ThroughputReport> r{Report({100}), Report({300})};
  const auto row = Summarize(r, 125, 200);
  EXPECT_EQ(row.flows, 2u);
  EXPECT_DOUBLE_EQ(row.fraction_below_low, 0.5);
  EXPECT_DOUBLE_EQ(row.median_rate, 200);
}

TEST(Compare, AmpleCapacityMakesAlgorithmsAgree) {
  const auto cfg = Small({"capacity.isl=1e9", "capacity.gsl=1e9"});
  const auto res = CompareAlgorithms(cfg);
  ASSERT_EQ(res.runs.size(), 4u);
  const auto& base = res.runs[0].reports[0];
  for (const auto& run : res.runs) {
    EXPECT_TRUE(run.error.empty()) << run.algorithm;
    ASSERT_EQ(run.reports[0].flows.size(), base.flows.size());
    for (std::size_t i = 0; i < base.flows.size(); ++i) {
      const auto& f = run.reports[0].flows[i];
      EXPECT_NEAR(f.realized, base.flows[i].realized, 1e-9) << run.algorithm;
      if (f.routed) EXPECT_NEAR(f.realized, f.offered, 1e-9) << run.algorithm;
    }
  }
  for (const auto& row : res.table.rows) EXPECT_LT(row.max_link_utilization, 1e-3);
}

TEST(Compare, IdenticalInputsAcrossAlgorithms) {
  const auto res = CompareAlgorithms(Small());
  EXPECT_EQ(res.snapshots.size(), 1u);
  for (const auto& run : res.runs) {
    ASSERT_EQ(run.assignments.size(), 1u);
    ASSERT_EQ(run.assignments[0].flows.size(), res.demands.size());
    for (std::size_t i = 0; i < res.demands.size(); ++i) {
      EXPECT_EQ(run.assignments[0].flows[i].demand.offered_rate, res.demands[i].offered_rate);
    }
  }
  EXPECT_NE(res.table.Find("mfss"), nullptr);
  EXPECT_EQ(res.table.Find("nope"), nullptr);
}

TEST(Compare, SubsetAndUnknownAlgorithm) {
  const auto one = CompareAlgorithms(Small(), {"ospf"});
  ASSERT_EQ(one.runs.size(), 1u);
  EXPECT_EQ(one.table.rows.size(), 1u);
  const auto bad = CompareAlgorithms(Small(), {"ospf", "magic"});
  ASSERT_EQ(bad.table.rows.size(), 2u);
  EXPECT_TRUE(bad.table.rows[0].error.empty());
  EXPECT_FALSE(bad.table.rows[1].error.empty());
}

TEST(Compare, TimeSeriesSnapshots) {
  const auto cfg = Small({"time.series.end=30", "time.series.step=15"});
  EXPECT_EQ(SnapshotTimes(cfg), (std::vector<double>{0, 15, 30}));
  const auto res = CompareAlgorithms(cfg, {"ospf"});
  EXPECT_EQ(res.runs[0].reports.size(), 3u);
  EXPECT_EQ(res.runs[0].cdf.sample_count(), 3 * res.demands.size());
}

TEST(RunScheduler, UnknownNameThrows) {
  const auto cfg = Small();
  const auto snap = ScenarioSnapshot(cfg, 0);
  const auto d = ScenarioDemands(cfg);
  EXPECT_THROW(RunScheduler("magic", cfg, snap, d, nullptr), Error);
}

TEST(PathDelayProfile, NondecreasingAndKOne) {
  const auto cfg = Small();
  const auto snap = ScenarioSnapshot(cfg, 0);
  const std::vector<CityPair> pairs{{cfg.CityIndex("New York"), cfg.CityIndex("London")}};
  const auto p = PathDelayProfile(snap, pairs, 20);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].src_name, "New York");
  EXPECT_EQ(p[0].delays_ms.size(), 20u);
  EXPECT_TRUE(std::is_sorted(p[0].delays_ms.begin(), p[0].delays_ms.end()));
  const auto one = PathDelayProfile(snap, pairs, 1);
  ASSERT_EQ(one[0].delays_ms.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].delays_ms[0], p[0].delays_ms[0]);
  // threads do not change the answer
  EXPECT_EQ(PathDelayProfile(snap, pairs, 20, 3)[0].delays_ms, p[0].delays_ms);
  EXPECT_THROW(PathDelayProfile(snap, pairs, 0), Error);
}

TEST(PathDelayProfile, UnroutablePairHasReason) {
  const auto g = fixture::Graph(2, 2, {{2, 0, 1}, {1, 3, 1}});
  const std::vector<CityPair> pairs{{0, 1}};
  const auto p = PathDelayProfile(g, pairs, 3);
  EXPECT_TRUE(p[0].delays_ms.empty());
  EXPECT_FALSE(p[0].reason.empty());
}

TEST(DefaultScenario, TailAndSummaryConsistency) {
  const auto cfg = LoadScenario(LEOSIM_DATA_DIR "/scenarios/default.yaml");
  const auto res = CompareAlgorithms(cfg);
  const CdfSeries* ospf = nullptr;
  const CdfSeries* mfss = nullptr;
  for (const auto& run : res.runs) {
    ASSERT_TRUE(run.error.empty()) << run.algorithm;
    const ComparisonRow* row = res.table.Find(run.algorithm);
    ASSERT_NE(row, nullptr);
    EXPECT_NEAR(row->fraction_below_low, run.cdf.FractionBelow(125), 1e-12) << run.algorithm;
    EXPECT_NEAR(row->fraction_above_high, run.cdf.FractionAbove(200), 1e-12) << run.algorithm;
    if (run.algorithm == "ospf") ospf = &run.cdf;
    if (run.algorithm == "mfss") mfss = &run.cdf;
  }
  ASSERT_TRUE(ospf && mfss);
  // MFSS CDF at or below OSPF from 200 up
  std::vector<double> xs{200};
  for (double v : ospf->values()) xs.push_back(v);
  for (double v : mfss->values()) xs.push_back(v);
  for (double x : xs) {
    if (x >= 200) EXPECT_LE(mfss->At(x), ospf->At(x) + 1e-12) << x;
  }
}

#pragma once

#include <span>
#include <string>
#include <vector>

#include "leosim/flow.hpp"
#include "leosim/routing.hpp"
#include "leosim/topology.hpp"
#include "leosim/traffic.hpp"

namespace leosim {

struct ScenarioConfig;

struct CityPair {
  int src = 0;
  int dst = 0;
};

struct DelayProfile {
  CityPair pair;
  std::string src_name;
  std::string dst_name;
  std::vector<double> delays_ms;  // nondecreasing, at most k entries
  std::string reason;             // set when the pair is unroutable
};

std::vector<DelayProfile> PathDelayProfile(const TopologySnapshot& snap,
                                           std::span<const CityPair> pairs, int k,
                                           int threads = 1);

// Empirical CDF over distinct sample values.
class CdfSeries {
 public:
  static CdfSeries FromSamples(std::vector<double> samples);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& fractions() const { return fractions_; }
  std::size_t sample_count() const { return count_; }

  double At(double x) const;          // P(sample <= x)
  double FractionBelow(double x) const;  // P(sample < x)
  double FractionAbove(double x) const { return 1.0 - At(x); }

 private:
  std::vector<double> values_;
  std::vector<double> fractions_;
  std::size_t count_ = 0;
};

// Throws Error(kInvalidArgument) on an empty report. Unrouted flows count
// as zero-rate samples.
CdfSeries ThroughputCdf(const ThroughputReport& report);

struct ComparisonRow {
  std::string algorithm;
  std::size_t flows = 0;
  double fraction_above_high = 0;
  double fraction_below_low = 0;
  double median_rate = 0;
  double max_link_utilization = 0;  // offered load / capacity
  std::string error;                // scheduler failure, row otherwise empty
};

struct ComparisonTable {
  double low_threshold = 125;
  double high_threshold = 200;
  std::vector<ComparisonRow> rows;

  const ComparisonRow* Find(const std::string& algorithm) const;
};

// Counts threshold fractions directly from the report rows (independent of
// the CDF code path).
ComparisonRow Summarize(std::span<const ThroughputReport> reports,
                        double low_threshold, double high_threshold);

struct AlgorithmRun {
  std::string algorithm;
  std::vector<FlowAssignment> assignments;  // one per snapshot time
  std::vector<ThroughputReport> reports;
  CdfSeries cdf;  // pooled over all snapshot times
  std::string error;
};

struct ComparisonResult {
  ComparisonTable table;
  std::vector<AlgorithmRun> runs;  // ospf, elb, b4, mfss
  std::vector<TopologySnapshot> snapshots;
  std::vector<FlowDemand> demands;
};

inline const std::vector<std::string>& AlgorithmNames() {
  static const std::vector<std::string> names = {"ospf", "elb", "b4", "mfss"};
  return names;
}

// Runs one scheduler over a snapshot. `cache` may be null.
FlowAssignment RunScheduler(const std::string& algorithm, const ScenarioConfig& config,
                            const TopologySnapshot& snap,
                            std::span<const FlowDemand> demands, PathCache* cache);

std::vector<double> SnapshotTimes(const ScenarioConfig& config);
std::vector<FlowDemand> ScenarioDemands(const ScenarioConfig& config);
TopologySnapshot ScenarioSnapshot(const ScenarioConfig& config, double t_s);

// Runs the listed algorithms (default: all four) on identical snapshots and
// demands. A failing scheduler fills its row's error without aborting others.
ComparisonResult CompareAlgorithms(const ScenarioConfig& config,
                                   std::vector<std::string> algorithms = {});

}  // namespace leosim

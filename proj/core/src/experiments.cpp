#include "leosim/experiments.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "leosim/error.hpp"
#include "leosim/io.hpp"
#include "leosim/scenario.hpp"
#include "parallel.hpp"

namespace leosim {

std::vector<DelayProfile> PathDelayProfile(const TopologySnapshot& snap,
                                           std::span<const CityPair> pairs, int k,
                                           int threads) {
  if (k < 1) throw InvalidArgument(fmt::format("profile K must be >= 1, got {}", k));
  std::vector<DelayProfile> out(pairs.size());
  internal::ParallelFor(pairs.size(), threads, [&](std::size_t i) {
    DelayProfile& prof = out[i];
    prof.pair = pairs[i];
    auto name = [&](int s) {
      return s >= 0 && s < static_cast<int>(snap.station_names.size())
                 ? snap.station_names[s]
                 : fmt::format("{}", s);
    };
    prof.src_name = name(pairs[i].src);
    prof.dst_name = name(pairs[i].dst);
    try {
      const NodeIndex src = snap.StationNode(pairs[i].src);
      const NodeIndex dst = snap.StationNode(pairs[i].dst);
      for (const Path& p : KShortestPaths(snap, src, dst, k)) {
        prof.delays_ms.push_back(p.total_delay_ms);
      }
    } catch (const Error& e) {
      prof.reason = e.what();
    }
  });
  return out;
}

CdfSeries CdfSeries::FromSamples(std::vector<double> samples) {
  CdfSeries cdf;
  cdf.count_ = samples.size();
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    cdf.values_.push_back(samples[i]);
    cdf.fractions_.push_back(static_cast<double>(i + 1) / n);
  }
  return cdf;
}

double CdfSeries::At(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return fractions_[(it - values_.begin()) - 1];
}

double CdfSeries::FractionBelow(double x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return fractions_[(it - values_.begin()) - 1];
}

CdfSeries ThroughputCdf(const ThroughputReport& report) {
  if (report.flows.empty()) {
    throw InvalidArgument("throughput report has no flows");
  }
  std::vector<double> samples;
  samples.reserve(report.flows.size());
  for (const FlowThroughput& f : report.flows) samples.push_back(f.realized);
  return CdfSeries::FromSamples(std::move(samples));
}

const ComparisonRow* ComparisonTable::Find(const std::string& algorithm) const {
  for (const ComparisonRow& row : rows) {
    if (row.algorithm == algorithm) return &row;
  }
  return nullptr;
}

ComparisonRow Summarize(std::span<const ThroughputReport> reports,
                        double low_threshold, double high_threshold) {
  ComparisonRow row;
  std::vector<double> rates;
  std::size_t above = 0, below = 0;
  for (const ThroughputReport& r : reports) {
    if (row.algorithm.empty()) row.algorithm = r.algorithm;
    row.max_link_utilization = std::max(row.max_link_utilization, r.max_offered_utilization);
    for (const FlowThroughput& f : r.flows) {
      rates.push_back(f.realized);
      if (f.realized > high_threshold) ++above;
      if (f.realized < low_threshold) ++below;
    }
  }
  row.flows = rates.size();
  if (rates.empty()) return row;
  row.fraction_above_high = static_cast<double>(above) / rates.size();
  row.fraction_below_low = static_cast<double>(below) / rates.size();
  std::sort(rates.begin(), rates.end());
  const std::size_t mid = rates.size() / 2;
  row.median_rate = rates.size() % 2 == 1 ? rates[mid] : 0.5 * (rates[mid - 1] + rates[mid]);
  return row;
}

std::vector<double> SnapshotTimes(const ScenarioConfig& config) {
  std::vector<double> times{config.time_s};
  if (config.time_series) {
    for (int i = 1;; ++i) {
      const double t = config.time_s + i * config.series_step_s;
      if (t > config.series_end_s + 1e-9) break;
      times.push_back(t);
    }
  }
  return times;
}

std::vector<FlowDemand> ScenarioDemands(const ScenarioConfig& config) {
  if (!config.demands_file.empty()) return ReadDemands(config.demands_file, config.cities);
  return GravityDemands(config.cities, config.total_rate, config.pairs);
}

TopologySnapshot ScenarioSnapshot(const ScenarioConfig& config, double t_s) {
  const std::vector<GroundStation> stations = config.Stations();
  return BuildSnapshot(config.constellation, stations, t_s, config.grid, config.capacity);
}

FlowAssignment RunScheduler(const std::string& algorithm, const ScenarioConfig& config,
                            const TopologySnapshot& snap,
                            std::span<const FlowDemand> demands, PathCache* cache) {
  if (algorithm == "ospf") return OspfAssign(snap, demands, cache);
  if (algorithm == "elb") {
    ElbParams p = config.elb;
    p.seed = config.seed;
    return ElbAssign(snap, demands, p, cache);
  }
  if (algorithm == "b4") return B4Assign(snap, demands, config.b4, cache);
  if (algorithm == "mfss") {
    MfssState state(config.mfss);
    return MfssAssign(snap, demands, state, cache);
  }
  throw InvalidArgument(fmt::format("unknown scheduler '{}'", algorithm));
}

ComparisonResult CompareAlgorithms(const ScenarioConfig& config,
                                   std::vector<std::string> algorithms) {
  if (algorithms.empty()) algorithms = AlgorithmNames();
  ComparisonResult result;
  result.table.low_threshold = config.low_threshold;
  result.table.high_threshold = config.high_threshold;
  result.demands = ScenarioDemands(config);
  result.runs.resize(algorithms.size());
  for (std::size_t a = 0; a < algorithms.size(); ++a) result.runs[a].algorithm = algorithms[a];

  const int depth = std::max(config.mfss.k, config.b4.k);
  for (double t : SnapshotTimes(config)) {
    result.snapshots.push_back(ScenarioSnapshot(config, t));
    const TopologySnapshot& snap = result.snapshots.back();

    // Candidate paths for every demand pair, computed once and shared.
    PathCache cache(snap, depth);
    std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
    for (const FlowDemand& d : result.demands) {
      try {
        pairs.emplace_back(snap.StationNode(d.src), snap.StationNode(d.dst));
      } catch (const Error&) {
      }
    }
    cache.Prefetch(pairs, config.threads);

    internal::ParallelFor(algorithms.size(), config.threads, [&](std::size_t a) {
      AlgorithmRun& run = result.runs[a];
      if (!run.error.empty()) return;
      try {
        run.assignments.push_back(
            RunScheduler(algorithms[a], config, snap, result.demands, &cache));
        run.reports.push_back(MaxMinFairThroughput(run.assignments.back(), snap));
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    });
  }

  for (AlgorithmRun& run : result.runs) {
    ComparisonRow row;
    if (run.error.empty()) {
      row = Summarize(run.reports, config.low_threshold, config.high_threshold);
      std::vector<double> samples;
      for (const ThroughputReport& r : run.reports) {
        for (const FlowThroughput& f : r.flows) samples.push_back(f.realized);
      }
      run.cdf = CdfSeries::FromSamples(std::move(samples));
    }
    row.algorithm = run.algorithm;
    row.error = run.error;
    result.table.rows.push_back(row);
  }
  return result;
}

}  // namespace leosim

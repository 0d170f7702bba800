#include "leosim/pipeline.hpp"

#include <fstream>
#include <functional>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "leosim/error.hpp"
#include "leosim/io.hpp"

namespace leosim {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Writes to a temporary name and renames, so a failed run never leaves a
// file that looks complete.
void WriteFile(const fs::path& path, const std::function<void(std::ostream&)>& body,
               FileList& written) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, fmt::format("write failed for '{}'", path.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
  }
  written.push_back(path);
}

FileList Prepare(const ScenarioConfig& config, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("cannot create output directory '{}': {}",
                                            out_dir.string(), ec.message()));
  }
  FileList written;
  WriteFile(out_dir / "effective_config.yaml",
            [&](std::ostream& out) { out << ScenarioToYaml(config); }, written);
  return written;
}


std::vector<CityPair> ProfilePairs(const ScenarioConfig& config) {
  std::vector<CityPair> pairs;
  for (const auto& [src, dst] : config.profile_pairs) {
    pairs.push_back({config.CityIndex(src), config.CityIndex(dst)});
  }
  return pairs;
}

}  // namespace

void WriteCdfCsv(std::ostream& out, const CdfSeries& cdf) {
  out << "value,fraction\n";
  for (std::size_t i = 0; i < cdf.values().size(); ++i) {
    out << FormatNumber(cdf.values()[i]) << ',' << FormatNumber(cdf.fractions()[i]) << '\n';
  }
}

void WriteComparisonCsv(std::ostream& out, const ComparisonTable& table) {
  out << "algorithm,flows,fraction_above_" << FormatNumber(table.high_threshold)
      << ",fraction_below_" << FormatNumber(table.low_threshold)
      << ",median_rate,max_link_utilization,error\n";
  for (const ComparisonRow& r : table.rows) {
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ' ';
    }
    out << r.algorithm << ',' << r.flows << ',' << FormatNumber(r.fraction_above_high) << ','
        << FormatNumber(r.fraction_below_low) << ',' << FormatNumber(r.median_rate) << ','
        << FormatNumber(r.max_link_utilization) << ',' << error << '\n';
  }
}

void WriteComparisonJsonl(std::ostream& out, const ComparisonTable& table,
                          std::uint64_t seed) {
  for (const ComparisonRow& r : table.rows) {
    ordered_json j;
    j["algorithm"] = r.algorithm;
    j["seed"] = seed;
    j["flows"] = r.flows;
    j["high_threshold"] = table.high_threshold;
    j["low_threshold"] = table.low_threshold;
    j["fraction_above_high"] = r.fraction_above_high;
    j["fraction_below_low"] = r.fraction_below_low;
    j["median_rate"] = r.median_rate;
    j["max_link_utilization"] = r.max_link_utilization;
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

void WriteDelayProfilesCsv(std::ostream& out, const std::vector<DelayProfile>& profiles) {
  out << "src,dst,rank,delay_ms,ratio_to_best\n";
  for (const DelayProfile& p : profiles) {
    if (!p.reason.empty()) {
      out << p.src_name << ',' << p.dst_name << ",0,,\n";
      continue;
    }
    for (std::size_t i = 0; i < p.delays_ms.size(); ++i) {
      out << p.src_name << ',' << p.dst_name << ',' << i + 1 << ','
          << FormatNumber(p.delays_ms[i]) << ','
          << FormatNumber(p.delays_ms[i] / p.delays_ms.front()) << '\n';
    }
  }
}

FileList RunGenerate(const ScenarioConfig& config, const fs::path& out_dir) {
  FileList written = Prepare(config, out_dir);
  const std::vector<SatElements> elements = BuildConstellation(config.constellation);
  WriteFile(out_dir / "constellation.jsonl", [&](std::ostream& out) {
    WriteConstellationJsonl(out, config.constellation, elements, config.time_s);
  }, written);
  return written;
}

FileList RunSnapshot(const ScenarioConfig& config, const fs::path& out_dir) {
  FileList written = Prepare(config, out_dir);
  WriteFile(out_dir / "snapshot.jsonl", [&](std::ostream& out) {
    for (double t : SnapshotTimes(config)) {
      const TopologySnapshot snap = ScenarioSnapshot(config, t);
      ordered_json head;
      head["record"] = "snapshot";
      head["t_s"] = t;
      head["nodes"] = snap.node_count();
      head["links"] = snap.link_count();
      head["hash"] = fmt::format("{:016x}", snap.ContentHash());
      head["unattached"] = ordered_json::array();
      for (int s : snap.unattached_stations) head["unattached"].push_back(snap.station_names[s]);
      head["warnings"] = snap.warnings;
      out << head.dump() << '\n';
      WriteSnapshotJsonl(out, snap);
    }
  }, written);
  return written;
}

FileList RunProfile(const ScenarioConfig& config, const fs::path& out_dir) {
  FileList written = Prepare(config, out_dir);
  const TopologySnapshot snap = ScenarioSnapshot(config, config.time_s);
  const std::vector<CityPair> pairs = ProfilePairs(config);
  const std::vector<DelayProfile> profiles =
      PathDelayProfile(snap, pairs, config.profile_k, config.threads);
  WriteFile(out_dir / "delay_profiles.csv",
            [&](std::ostream& out) { WriteDelayProfilesCsv(out, profiles); }, written);
  return written;
}

FileList RunSimulate(const ScenarioConfig& config, const fs::path& out_dir) {
  FileList written = Prepare(config, out_dir);
  const ComparisonResult result = CompareAlgorithms(config, {config.scheduler});
  const AlgorithmRun& run = result.runs.front();
  if (!run.error.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("scheduler {} failed: {}", run.algorithm, run.error));
  }
  WriteFile(out_dir / fmt::format("assignment_{}.jsonl", run.algorithm),
            [&](std::ostream& out) {
              for (std::size_t i = 0; i < run.assignments.size(); ++i) {
                std::vector<double> realized;
                for (const FlowThroughput& f : run.reports[i].flows) {
                  realized.push_back(f.realized);
                }
                WriteAssignmentJsonl(out, result.snapshots[i], run.assignments[i], realized);
              }
            },
            written);
  WriteFile(out_dir / fmt::format("cdf_{}.csv", run.algorithm),
            [&](std::ostream& out) { WriteCdfCsv(out, run.cdf); }, written);
  WriteFile(out_dir / "summary.csv",
            [&](std::ostream& out) { WriteComparisonCsv(out, result.table); }, written);
  return written;
}

FileList RunCompare(const ScenarioConfig& config, const fs::path& out_dir,
                    ComparisonResult* result_out) {
  FileList written = Prepare(config, out_dir);
  ComparisonResult result = CompareAlgorithms(config);
  for (const AlgorithmRun& run : result.runs) {
    if (!run.error.empty()) continue;
    WriteFile(out_dir / fmt::format("cdf_{}.csv", run.algorithm),
              [&](std::ostream& out) { WriteCdfCsv(out, run.cdf); }, written);
    WriteFile(out_dir / fmt::format("assignment_{}.jsonl", run.algorithm),
              [&](std::ostream& out) {
                for (std::size_t i = 0; i < run.assignments.size(); ++i) {
                  std::vector<double> realized;
                  for (const FlowThroughput& f : run.reports[i].flows) {
                    realized.push_back(f.realized);
                  }
                  WriteAssignmentJsonl(out, result.snapshots[i], run.assignments[i],
                                       realized);
                }
              },
              written);
  }
  WriteFile(out_dir / "comparison.csv",
            [&](std::ostream& out) { WriteComparisonCsv(out, result.table); }, written);
  WriteFile(out_dir / "comparison.jsonl",
            [&](std::ostream& out) { WriteComparisonJsonl(out, result.table, config.seed); },
            written);
  std::string failed;
  for (const AlgorithmRun& run : result.runs) {
    if (!run.error.empty()) failed += fmt::format("{}{}: {}", failed.empty() ? "" : "; ",
                                                  run.algorithm, run.error);
  }
  if (result_out != nullptr) *result_out = std::move(result);
  if (!failed.empty()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("scheduler failure: {}", failed));
  }
  return written;
}

}  // namespace leosim

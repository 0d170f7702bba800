#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "leosim/experiments.hpp"
#include "leosim/scenario.hpp"

namespace leosim {

// Each stage writes into `out_dir` (created if needed), echoes the effective
// config as effective_config.yaml, and returns the files it wrote in order.
// Any write failure throws Error(kIo) naming the file.
using FileList = std::vector<std::filesystem::path>;

FileList RunGenerate(const ScenarioConfig& config, const std::filesystem::path& out_dir);
FileList RunSnapshot(const ScenarioConfig& config, const std::filesystem::path& out_dir);
FileList RunProfile(const ScenarioConfig& config, const std::filesystem::path& out_dir);
FileList RunSimulate(const ScenarioConfig& config, const std::filesystem::path& out_dir);
// `result` receives the in-memory comparison when non-null.
FileList RunCompare(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                    ComparisonResult* result = nullptr);

// Two columns, value then cumulative fraction.
void WriteCdfCsv(std::ostream& out, const CdfSeries& cdf);
void WriteComparisonCsv(std::ostream& out, const ComparisonTable& table);
void WriteComparisonJsonl(std::ostream& out, const ComparisonTable& table,
                          std::uint64_t seed);
void WriteDelayProfilesCsv(std::ostream& out, const std::vector<DelayProfile>& profiles);

}  // namespace leosim

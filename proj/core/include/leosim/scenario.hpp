#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "leosim/orbital.hpp"
#include "leosim/routing.hpp"
#include "leosim/topology.hpp"
#include "leosim/traffic.hpp"

namespace leosim {

// Everything a run needs. Loaded from a YAML tree; see docs/scenario.md for
// the key reference.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all cores

  std::string constellation_preset = "starlink_sim";  // empty when inline
  ConstellationSpec constellation;

  GridPolicy grid;
  std::string capacity_profile = "default";
  CapacityProfile capacity;

  std::filesystem::path cities_file;
  std::vector<City> cities;
  double min_elevation_deg = 25;

  double total_rate = 1000;
  PairSelection pairs;
  std::filesystem::path demands_file;  // replaces the gravity model when set

  double time_s = 0;
  bool time_series = false;
  double series_end_s = 0;
  double series_step_s = 15;

  std::string scheduler = "mfss";
  MfssParams mfss;
  ElbParams elb;
  B4Params b4;

  int profile_k = 30;
  std::vector<std::pair<std::string, std::string>> profile_pairs;

  double low_threshold = 125;
  double high_threshold = 200;

  std::filesystem::path output_dir = "out";

  std::vector<GroundStation> Stations() const;
  int CityIndex(const std::string& name) const;
};

// Parses `path`, applies "dotted.key=value" overrides on top of the file,
// resolves relative file references against the config's directory, loads
// the city list and validates every field. Errors are Error(kConfig) and
// name the offending key and its line.
ScenarioConfig LoadScenario(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

// Same, from YAML text; relative paths resolve against `base_dir`.
ScenarioConfig ParseScenario(const std::string& yaml_text,
                             const std::filesystem::path& base_dir,
                             const std::vector<std::string>& overrides = {});

// Effective configuration as YAML; reloading it reproduces the same run.
std::string ScenarioToYaml(const ScenarioConfig& config);

}  // namespace leosim

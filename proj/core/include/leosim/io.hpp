#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "leosim/flow.hpp"
#include "leosim/orbital.hpp"
#include "leosim/topology.hpp"
#include "leosim/traffic.hpp"

namespace leosim {

// Delimited text (comma, or whitespace when no comma is present). Blank
// lines and lines starting with '#' are skipped, as is a header row whose
// second field is not numeric.
//   cities:   name, lat_deg, lon_deg, weight [, region]
//   stations: name, lat_deg, lon_deg [, min_elevation_deg]
//   demands:  src_name, dst_name, offered_rate
std::vector<City> ReadCities(const std::filesystem::path& path);
std::vector<GroundStation> ReadStations(const std::filesystem::path& path,
                                        double default_min_elevation_deg = 25);
std::vector<FlowDemand> ReadDemands(const std::filesystem::path& path,
                                    std::span<const City> cities);
void WriteDemands(std::ostream& out, std::span<const FlowDemand> demands,
                  std::span<const City> cities);

// JSON-lines writers. One object per line, keys in fixed order.
void WriteConstellationJsonl(std::ostream& out, const ConstellationSpec& spec,
                             std::span<const SatElements> elements, double t_s);
void WriteSnapshotJsonl(std::ostream& out, const TopologySnapshot& snap);
void WriteAssignmentJsonl(std::ostream& out, const TopologySnapshot& snap,
                          const FlowAssignment& assignment,
                          std::span<const double> realized = {});

// Shortest round-trip decimal form, identical on every run.
std::string FormatNumber(double v);

}  // namespace leosim

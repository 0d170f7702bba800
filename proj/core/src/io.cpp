#include "leosim/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "leosim/error.hpp"

namespace leosim {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(Trim(field));
  } else {
    std::stringstream ss(line);
    std::string field;
    while (ss >> field) out.push_back(field);
  }
  return out;
}

bool ParseDouble(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct Row {
  int line = 0;
  std::vector<std::string> fields;
};

std::vector<Row> ReadRows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open file '{}'", path.string()));
  }
  std::vector<Row> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    Row row{number, SplitFields(t)};
    double probe;
    if (rows.empty() && row.fields.size() > 1 && !ParseDouble(row.fields[1], probe)) {
      continue;  // header
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double Number(const std::filesystem::path& path, const Row& row, std::size_t i,
              const char* what) {
  double v = 0;
  if (i >= row.fields.size() || !ParseDouble(row.fields[i], v)) {
    throw Error(ErrorCode::kIo, fmt::format("{}:{}: expected numeric {} in column {}",
                                            path.string(), row.line, what, i + 1));
  }
  return v;
}

}  // namespace

std::vector<City> ReadCities(const std::filesystem::path& path) {
  std::vector<City> out;
  for (const Row& row : ReadRows(path)) {
    if (row.fields.size() < 4) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}:{}: expected name, lat, lon, weight[, region]",
                              path.string(), row.line));
    }
    City c;
    c.name = row.fields[0];
    c.lat_deg = Number(path, row, 1, "latitude");
    c.lon_deg = Number(path, row, 2, "longitude");
    c.weight = Number(path, row, 3, "weight");
    if (row.fields.size() > 4) c.region = row.fields[4];
    try {
      c.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}:{}: {}", path.string(), row.line, e.what()));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GroundStation> ReadStations(const std::filesystem::path& path,
                                        double default_min_elevation_deg) {
  std::vector<GroundStation> out;
  for (const Row& row : ReadRows(path)) {
    if (row.fields.size() < 3) {
      throw Error(ErrorCode::kIo, fmt::format("{}:{}: expected name, lat, lon",
                                              path.string(), row.line));
    }
    GroundStation gs;
    gs.name = row.fields[0];
    gs.lat_deg = Number(path, row, 1, "latitude");
    gs.lon_deg = Number(path, row, 2, "longitude");
    gs.min_elevation_deg = default_min_elevation_deg;
    try {
      gs.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}:{}: {}", path.string(), row.line, e.what()));
    }
    out.push_back(std::move(gs));
  }
  return out;
}

std::vector<FlowDemand> ReadDemands(const std::filesystem::path& path,
                                    std::span<const City> cities) {
  auto lookup = [&](const Row& row, const std::string& name) {
    for (std::size_t i = 0; i < cities.size(); ++i) {
      if (cities[i].name == name) return static_cast<int>(i);
    }
    throw Error(ErrorCode::kIo, fmt::format("{}:{}: unknown city '{}'",
                                            path.string(), row.line, name));
  };
  std::vector<FlowDemand> out;
  for (const Row& row : ReadRows(path)) {
    if (row.fields.size() < 3) {
      throw Error(ErrorCode::kIo, fmt::format("{}:{}: expected src, dst, offered_rate",
                                              path.string(), row.line));
    }
    FlowDemand d;
    d.id = out.size();
    d.src = lookup(row, row.fields[0]);
    d.dst = lookup(row, row.fields[1]);
    d.offered_rate = Number(path, row, 2, "offered_rate");
    if (d.src == d.dst || !(d.offered_rate > 0)) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}:{}: demand needs distinct cities and a positive rate",
                              path.string(), row.line));
    }
    out.push_back(d);
  }
  return out;
}

std::string FormatNumber(double v) { return fmt::format("{}", v); }

void WriteDemands(std::ostream& out, std::span<const FlowDemand> demands,
                  std::span<const City> cities) {
  out << "src,dst,offered_rate\n";
  for (const FlowDemand& d : demands) {
    out << cities[d.src].name << ',' << cities[d.dst].name << ','
        << FormatNumber(d.offered_rate) << '\n';
  }
}

namespace {

using nlohmann::ordered_json;

ordered_json NodeJson(const NodeId& id) {
  ordered_json j;
  if (const auto* sat = std::get_if<SatelliteId>(&id)) {
    j["type"] = "satellite";
    j["shell"] = sat->shell;
    j["plane"] = sat->plane;
    j["slot"] = sat->slot;
  } else {
    j["type"] = "ground";
    j["station"] = std::get<GroundId>(id).station;
  }
  return j;
}

}  // namespace

void WriteConstellationJsonl(std::ostream& out, const ConstellationSpec& spec,
                             std::span<const SatElements> elements, double t_s) {
  ordered_json header;
  header["record"] = "constellation";
  header["name"] = spec.name;
  header["satellites"] = elements.size();
  header["t_s"] = t_s;
  header["shells"] = ordered_json::array();
  for (const ShellSpec& s : spec.shells) {
    header["shells"].push_back({{"altitude_km", s.altitude_km},
                                {"inclination_deg", s.inclination_deg},
                                {"num_planes", s.num_planes},
                                {"sats_per_plane", s.sats_per_plane},
                                {"phasing_factor", s.phasing_factor},
                                {"raan_spread_deg", s.raan_spread_deg}});
  }
  out << header.dump() << '\n';
  for (const SatElements& e : elements) {
    const SatPosition p = Propagate(e, t_s, Frame::kEarthFixed);
    const GeoPoint g = Subpoint(p);
    ordered_json j;
    j["record"] = "satellite";
    j["shell"] = e.shell_index;
    j["plane"] = e.plane_index;
    j["slot"] = e.slot_index;
    j["raan_deg"] = RadToDeg(e.raan_rad);
    j["phase0_deg"] = RadToDeg(e.phase0_rad);
    j["semi_major_axis_km"] = e.semi_major_axis_km;
    j["ecef_km"] = {p.r.x, p.r.y, p.r.z};
    j["lat_deg"] = g.lat_deg;
    j["lon_deg"] = g.lon_deg;
    out << j.dump() << '\n';
  }
}

void WriteSnapshotJsonl(std::ostream& out, const TopologySnapshot& snap) {
  for (NodeIndex i = 0; i < snap.node_count(); ++i) {
    ordered_json j;
    j["record"] = "node";
    j["index"] = i;
    j["id"] = NodeLabel(snap.node(i));
    const ordered_json id = NodeJson(snap.node(i));
    for (const auto& [k, v] : id.items()) j[k] = v;
    if (const auto* g = std::get_if<GroundId>(&snap.node(i))) {
      if (g->station < static_cast<int>(snap.station_names.size())) {
        j["name"] = snap.station_names[g->station];
      }
    }
    if (i < snap.positions.size()) {
      const GeoPoint p = Subpoint({snap.positions[i], Frame::kEarthFixed});
      j["lat_deg"] = p.lat_deg;
      j["lon_deg"] = p.lon_deg;
    }
    out << j.dump() << '\n';
  }
  for (LinkIndex i = 0; i < snap.link_count(); ++i) {
    const Link& l = snap.link(i);
    ordered_json j;
    j["record"] = "link";
    j["index"] = i;
    j["a"] = l.a;
    j["b"] = l.b;
    j["kind"] = l.kind == LinkKind::kIsl ? "isl" : "gsl";
    j["delay_ms"] = l.delay_ms;
    j["capacity"] = l.capacity;
    out << j.dump() << '\n';
  }
}

void WriteAssignmentJsonl(std::ostream& out, const TopologySnapshot& snap,
                          const FlowAssignment& assignment,
                          std::span<const double> realized) {
  for (std::size_t k = 0; k < assignment.flows.size(); ++k) {
    const AssignedFlow& f = assignment.flows[k];
    ordered_json j;
    j["flow"] = f.demand.id;
    j["t_s"] = snap.time_s();
    j["algorithm"] = assignment.algorithm;
    j["src"] = f.demand.src < static_cast<int>(snap.station_names.size())
                   ? snap.station_names[f.demand.src]
                   : std::to_string(f.demand.src);
    j["dst"] = f.demand.dst < static_cast<int>(snap.station_names.size())
                   ? snap.station_names[f.demand.dst]
                   : std::to_string(f.demand.dst);
    j["offered"] = f.demand.offered_rate;
    j["routed"] = f.routed;
    if (!f.routed) j["reason"] = f.reason;
    j["rate"] = f.rate;
    if (k < realized.size()) j["realized"] = realized[k];
    j["plane"] = f.plane == RoutingPlane::kIp ? "ip" : "auxiliary";
    j["deflections"] = f.deflections;
    j["delay_ms"] = f.path.total_delay_ms;
    ordered_json path = ordered_json::array();
    for (NodeIndex n : f.path.nodes) path.push_back(NodeLabel(snap.node(n)));
    j["path"] = std::move(path);
    out << j.dump() << '\n';
  }
}

}  // namespace leosim

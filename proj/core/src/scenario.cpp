#include "leosim/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "leosim/error.hpp"
#include "leosim/io.hpp"

namespace leosim {

std::vector<GroundStation> ScenarioConfig::Stations() const {
  std::vector<GroundStation> out;
  out.reserve(cities.size());
  for (const City& c : cities) out.push_back(c.AsStation(min_elevation_deg));
  return out;
}

int ScenarioConfig::CityIndex(const std::string& city) const {
  for (std::size_t i = 0; i < cities.size(); ++i) {
    if (cities[i].name == city) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> SplitKey(const std::string& dotted) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  return parts;
}

// Typed access to the YAML tree that remembers where each key came from and
// which keys were consumed.
class Reader {
 public:
  Reader(YAML::Node root, std::set<std::string> overridden)
      : root_(std::move(root)), overridden_(std::move(overridden)) {}

  YAML::Node Find(const std::string& dotted) const {
    std::vector<YAML::Node> chain{root_};
    for (const std::string& part : SplitKey(dotted)) {
      const YAML::Node& cur = chain.back();
      if (!cur.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
      YAML::Node next = cur[part];
      if (!next) return YAML::Node(YAML::NodeType::Undefined);
      chain.push_back(next);
    }
    return chain.back();
  }

  bool Has(const std::string& key) const { return Find(key).IsDefined(); }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    YAML::Node node = Find(key);
    consumed_.insert(key);
    if (!node.IsDefined() || node.IsNull()) return fallback;
    lines_[key] = node.Mark().line;
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(key, fmt::format("cannot convert '{}' to the expected type",
                            node.IsScalar() ? node.Scalar() : std::string("<tree>")));
    }
  }

  YAML::Node Node(const std::string& key) {
    consumed_.insert(key);
    YAML::Node node = Find(key);
    if (node.IsDefined()) lines_[key] = node.Mark().line;
    return node;
  }

  [[noreturn]] void Fail(const std::string& key, const std::string& message) const {
    throw Error(ErrorCode::kConfig,
                fmt::format("config error: key '{}' ({}): {}", key, Where(key), message));
  }

  std::string Where(const std::string& key) const {
    if (overridden_.contains(key)) return "command-line override";
    auto it = lines_.find(key);
    if (it == lines_.end()) return "default value";
    return fmt::format("line {}", it->second + 1);
  }

  // Rejects keys nobody asked for, which are almost always typos.
  void CheckUnknown() const { Walk(root_, ""); }

 private:
  void Walk(const YAML::Node& node, const std::string& prefix) const {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const std::string key =
          prefix.empty() ? kv.first.as<std::string>() : prefix + "." + kv.first.as<std::string>();
      if (consumed_.contains(key)) continue;
      bool is_parent = false;
      for (const std::string& c : consumed_) {
        if (c.rfind(key + ".", 0) == 0) {
          is_parent = true;
          break;
        }
      }
      if (!is_parent) {
        const int line = kv.first.Mark().line;
        throw Error(ErrorCode::kConfig,
                    fmt::format("config error: unknown key '{}' ({})", key,
                                overridden_.contains(key) || line < 0
                                    ? "command-line override"
                                         : fmt::format("line {}", line + 1)));
      }
      Walk(kv.second, key);
    }
  }

  YAML::Node root_;
  std::set<std::string> overridden_;
  std::set<std::string> consumed_;
  std::map<std::string, int> lines_;
};

void ApplyOverride(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kConfig,
                fmt::format("config error: override '{}' is not key=value", assignment));
  }
  const std::vector<std::string> parts = SplitKey(assignment.substr(0, eq));
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig,
                fmt::format("config error: override '{}': {}", assignment, e.what()));
  }
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node cur = chain.back();
    if (!cur[parts[i]] || !cur[parts[i]].IsMap()) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
    chain.push_back(cur[parts[i]]);
  }
  chain.back()[parts.back()] = value;
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative()) p = base / p;
  return std::filesystem::absolute(p).lexically_normal();
}

ShellSpec ReadShell(Reader& r, const std::string& key, const YAML::Node& node) {
  ShellSpec s;
  try {
    s.altitude_km = node["altitude_km"].as<double>();
    s.inclination_deg = node["inclination_deg"].as<double>();
    s.num_planes = node["num_planes"].as<int>();
    s.sats_per_plane = node["sats_per_plane"].as<int>();
    s.phasing_factor = node["phasing_factor"] ? node["phasing_factor"].as<int>() : 0;
    s.raan_spread_deg =
        node["raan_spread_deg"] ? node["raan_spread_deg"].as<double>() : 360.0;
  } catch (const YAML::Exception&) {
    r.Fail(key, "shell needs altitude_km, inclination_deg, num_planes, sats_per_plane");
  }
  try {
    s.Validate();
  } catch (const Error& e) {
    r.Fail(key, e.what());
  }
  return s;
}

ScenarioConfig Build(YAML::Node root, const std::filesystem::path& base_dir,
                     const std::vector<std::string>& overrides) {
  if (!root.IsDefined() || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) {
    throw Error(ErrorCode::kConfig, "config error: top level must be a key-value map");
  }
  std::set<std::string> overridden;
  for (const std::string& o : overrides) {
    ApplyOverride(root, o);
    overridden.insert(o.substr(0, o.find('=')));
  }

  Reader r(root, std::move(overridden));
  ScenarioConfig c;
  c.name = r.Get<std::string>("name", c.name);
  c.seed = r.Get<std::uint64_t>("seed", c.seed);
  c.threads = r.Get<int>("threads", c.threads);
  if (c.threads < 0) r.Fail("threads", "must be >= 0 (0 = all cores)");

  // constellation
  const YAML::Node shells = r.Node("constellation.shells");
  if (shells.IsDefined() && !shells.IsNull()) {
    if (!shells.IsSequence() || shells.size() == 0) {
      r.Fail("constellation.shells", "must be a non-empty list of shells");
    }
    c.constellation_preset.clear();
    c.constellation.name = r.Get<std::string>("constellation.name", "custom");
    for (std::size_t i = 0; i < shells.size(); ++i) {
      c.constellation.shells.push_back(ReadShell(r, "constellation.shells", shells[i]));
    }
  } else {
    c.constellation_preset =
        r.Get<std::string>("constellation.preset", c.constellation_preset);
    try {
      c.constellation = presets::ByName(c.constellation_preset);
    } catch (const Error& e) {
      r.Fail("constellation.preset", e.what());
    }
    r.Get<std::string>("constellation.name", "");
  }

  c.grid.isl_enabled = r.Get<bool>("grid.isl_enabled", c.grid.isl_enabled);
  c.grid.seam_links = r.Get<bool>("grid.seam_links", c.grid.seam_links);
  c.grid.polar_cutoff_deg = r.Get<double>("grid.polar_cutoff_deg", c.grid.polar_cutoff_deg);
  if (!(c.grid.polar_cutoff_deg >= 0 && c.grid.polar_cutoff_deg <= 90)) {
    r.Fail("grid.polar_cutoff_deg", "must be in [0, 90]");
  }

  c.capacity_profile = r.Get<std::string>("capacity.profile", c.capacity_profile);
  if (c.capacity_profile == "laser") {
    c.capacity = CapacityProfile::Laser();
  } else if (c.capacity_profile != "default") {
    r.Fail("capacity.profile", "must be 'default' or 'laser'");
  }
  c.capacity.isl = r.Get<double>("capacity.isl", c.capacity.isl);
  c.capacity.gsl = r.Get<double>("capacity.gsl", c.capacity.gsl);
  if (!(c.capacity.isl > 0)) r.Fail("capacity.isl", "must be > 0");
  if (!(c.capacity.gsl > 0)) r.Fail("capacity.gsl", "must be > 0");

  const std::string cities = r.Get<std::string>("stations.file", "");
  if (cities.empty()) r.Fail("stations.file", "a city/station file is required");
  c.cities_file = Resolve(base_dir, cities);
  if (!std::filesystem::exists(c.cities_file)) {
    r.Fail("stations.file", fmt::format("file not found: {}", c.cities_file.string()));
  }
  try {
    c.cities = ReadCities(c.cities_file);
  } catch (const Error& e) {
    r.Fail("stations.file", e.what());
  }
  if (c.cities.size() < 2) r.Fail("stations.file", "needs at least two cities");
  c.min_elevation_deg = r.Get<double>("stations.min_elevation_deg", c.min_elevation_deg);
  if (!(c.min_elevation_deg >= 0 && c.min_elevation_deg < 90)) {
    r.Fail("stations.min_elevation_deg", "must be in [0, 90)");
  }

  c.total_rate = r.Get<double>("traffic.total_rate", c.total_rate);
  if (!(c.total_rate > 0)) r.Fail("traffic.total_rate", "must be > 0");
  try {
    c.pairs.policy = ParsePairPolicy(
        r.Get<std::string>("traffic.pair_policy", PairPolicyName(c.pairs.policy)));
  } catch (const Error& e) {
    r.Fail("traffic.pair_policy", e.what());
  }
  c.pairs.partners = r.Get<int>("traffic.partners", c.pairs.partners);
  if (c.pairs.partners < 1) r.Fail("traffic.partners", "must be >= 1");
  const std::string demands = r.Get<std::string>("traffic.demands_file", "");
  if (!demands.empty()) {
    c.demands_file = Resolve(base_dir, demands);
    if (!std::filesystem::exists(c.demands_file)) {
      r.Fail("traffic.demands_file",
             fmt::format("file not found: {}", c.demands_file.string()));
    }
  }

  c.time_s = r.Get<double>("time.t", c.time_s);
  if (!(c.time_s >= 0)) r.Fail("time.t", "must be >= 0");
  if (r.Has("time.series")) {
    c.time_series = true;
    c.series_end_s = r.Get<double>("time.series.end", c.time_s);
    c.series_step_s = r.Get<double>("time.series.step", c.series_step_s);
    if (!(c.series_step_s > 0)) r.Fail("time.series.step", "must be > 0");
    if (!(c.series_end_s >= c.time_s)) r.Fail("time.series.end", "must be >= time.t");
  }

  c.scheduler = r.Get<std::string>("scheduler", c.scheduler);
  if (c.scheduler != "ospf" && c.scheduler != "elb" && c.scheduler != "b4" &&
      c.scheduler != "mfss") {
    r.Fail("scheduler", "must be one of ospf, elb, b4, mfss");
  }

  c.mfss.theta = r.Get<double>("mfss.theta", c.mfss.theta);
  if (!(c.mfss.theta > 0 && c.mfss.theta < 1)) {
    r.Fail("mfss.theta", fmt::format("must be in (0, 1), got {}", c.mfss.theta));
  }
  c.mfss.alpha = r.Get<double>("mfss.alpha", c.mfss.alpha);
  if (!(c.mfss.alpha > 0 && c.mfss.alpha <= 1)) {
    r.Fail("mfss.alpha", fmt::format("must be in (0, 1], got {}", c.mfss.alpha));
  }
  c.mfss.epsilon = r.Get<double>("mfss.epsilon", c.mfss.epsilon);
  if (!(c.mfss.epsilon >= 0)) r.Fail("mfss.epsilon", "must be >= 0");
  c.mfss.k = r.Get<int>("mfss.k", c.mfss.k);
  if (c.mfss.k < 1) r.Fail("mfss.k", "must be >= 1");
  c.mfss.deactivate_when_clear =
      r.Get<bool>("mfss.deactivate_when_clear", c.mfss.deactivate_when_clear);
  c.mfss.detour_search = r.Get<bool>("mfss.detour_search", c.mfss.detour_search);

  c.elb.busy_threshold = r.Get<double>("elb.busy_threshold", c.elb.busy_threshold);
  if (!(c.elb.busy_threshold > 0 && c.elb.busy_threshold <= 1)) {
    r.Fail("elb.busy_threshold", "must be in (0, 1]");
  }
  c.elb.deflection_fraction =
      r.Get<double>("elb.deflection_fraction", c.elb.deflection_fraction);
  if (!(c.elb.deflection_fraction >= 0 && c.elb.deflection_fraction <= 1)) {
    r.Fail("elb.deflection_fraction", "must be in [0, 1]");
  }
  c.elb.ttl = r.Get<int>("elb.ttl", c.elb.ttl);
  if (c.elb.ttl < 1) r.Fail("elb.ttl", "must be >= 1");
  c.elb.seed = c.seed;

  c.b4.k = r.Get<int>("b4.k", c.b4.k);
  if (c.b4.k < 1) r.Fail("b4.k", "must be >= 1");

  c.profile_k = r.Get<int>("profile.k", c.profile_k);
  if (c.profile_k < 1) r.Fail("profile.k", "must be >= 1");
  const YAML::Node pairs = r.Node("profile.pairs");
  if (pairs.IsDefined() && !pairs.IsNull()) {
    if (!pairs.IsSequence()) r.Fail("profile.pairs", "must be a list of [src, dst]");
    for (const auto& p : pairs) {
      if (!p.IsSequence() || p.size() != 2) {
        r.Fail("profile.pairs", "each entry must be [src, dst]");
      }
      auto src = p[0].as<std::string>(), dst = p[1].as<std::string>();
      if (c.CityIndex(src) < 0 || c.CityIndex(dst) < 0) {
        r.Fail("profile.pairs",
               fmt::format("unknown city in pair [{}, {}]", src, dst));
      }
      c.profile_pairs.emplace_back(src, dst);
    }
  } else {
    // Long-haul pairs across the three default regions, when present.
    const std::vector<std::pair<std::string, std::string>> fallback = {
        {"New York", "London"}, {"Singapore", "Frankfurt"}, {"Tokyo", "Los Angeles"}};
    for (const auto& [src, dst] : fallback) {
      if (c.CityIndex(src) >= 0 && c.CityIndex(dst) >= 0) c.profile_pairs.emplace_back(src, dst);
    }
  }

  c.low_threshold = r.Get<double>("report.low_threshold", c.low_threshold);
  c.high_threshold = r.Get<double>("report.high_threshold", c.high_threshold);
  if (!(c.low_threshold >= 0 && c.high_threshold >= c.low_threshold)) {
    r.Fail("report.high_threshold", "thresholds need 0 <= low <= high");
  }

  c.output_dir = r.Get<std::string>("output.dir", c.output_dir.string());

  r.CheckUnknown();
  return c;
}

}  // namespace

ScenarioConfig ParseScenario(const std::string& yaml_text,
                             const std::filesystem::path& base_dir,
                             const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kConfig,
                fmt::format("config error: parse failure at line {}: {}", e.mark.line + 1,
                            e.msg));
  }
  return Build(root, base_dir, overrides);
}

ScenarioConfig LoadScenario(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseScenario(buffer.str(), path.parent_path(), overrides);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string ScenarioToYaml(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "threads" << YAML::Value << c.threads;

  out << YAML::Key << "constellation" << YAML::Value << YAML::BeginMap;
  if (!c.constellation_preset.empty()) {
    out << YAML::Key << "preset" << YAML::Value << c.constellation_preset;
  } else {
    out << YAML::Key << "name" << YAML::Value << c.constellation.name;
    out << YAML::Key << "shells" << YAML::Value << YAML::BeginSeq;
    for (const ShellSpec& s : c.constellation.shells) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "altitude_km" << YAML::Value << s.altitude_km;
      out << YAML::Key << "inclination_deg" << YAML::Value << s.inclination_deg;
      out << YAML::Key << "num_planes" << YAML::Value << s.num_planes;
      out << YAML::Key << "sats_per_plane" << YAML::Value << s.sats_per_plane;
      out << YAML::Key << "phasing_factor" << YAML::Value << s.phasing_factor;
      out << YAML::Key << "raan_spread_deg" << YAML::Value << s.raan_spread_deg;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "isl_enabled" << YAML::Value << c.grid.isl_enabled;
  out << YAML::Key << "seam_links" << YAML::Value << c.grid.seam_links;
  out << YAML::Key << "polar_cutoff_deg" << YAML::Value << c.grid.polar_cutoff_deg;
  out << YAML::EndMap;

  out << YAML::Key << "capacity" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "profile" << YAML::Value << c.capacity_profile;
  out << YAML::Key << "isl" << YAML::Value << c.capacity.isl;
  out << YAML::Key << "gsl" << YAML::Value << c.capacity.gsl;
  out << YAML::EndMap;

  out << YAML::Key << "stations" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "file" << YAML::Value << c.cities_file.string();
  out << YAML::Key << "min_elevation_deg" << YAML::Value << c.min_elevation_deg;
  out << YAML::EndMap;

  out << YAML::Key << "traffic" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "total_rate" << YAML::Value << c.total_rate;
  out << YAML::Key << "pair_policy" << YAML::Value << PairPolicyName(c.pairs.policy);
  out << YAML::Key << "partners" << YAML::Value << c.pairs.partners;
  if (!c.demands_file.empty()) {
    out << YAML::Key << "demands_file" << YAML::Value << c.demands_file.string();
  }
  out << YAML::EndMap;

  out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t" << YAML::Value << c.time_s;
  if (c.time_series) {
    out << YAML::Key << "series" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "end" << YAML::Value << c.series_end_s;
    out << YAML::Key << "step" << YAML::Value << c.series_step_s;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "scheduler" << YAML::Value << c.scheduler;

  out << YAML::Key << "mfss" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta" << YAML::Value << c.mfss.theta;
  out << YAML::Key << "alpha" << YAML::Value << c.mfss.alpha;
  out << YAML::Key << "epsilon" << YAML::Value << c.mfss.epsilon;
  out << YAML::Key << "k" << YAML::Value << c.mfss.k;
  out << YAML::Key << "deactivate_when_clear" << YAML::Value << c.mfss.deactivate_when_clear;
  out << YAML::Key << "detour_search" << YAML::Value << c.mfss.detour_search;
  out << YAML::EndMap;

  out << YAML::Key << "elb" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "busy_threshold" << YAML::Value << c.elb.busy_threshold;
  out << YAML::Key << "deflection_fraction" << YAML::Value << c.elb.deflection_fraction;
  out << YAML::Key << "ttl" << YAML::Value << c.elb.ttl;
  out << YAML::EndMap;

  out << YAML::Key << "b4" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "k" << YAML::Value << c.b4.k;
  out << YAML::EndMap;

  out << YAML::Key << "profile" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "k" << YAML::Value << c.profile_k;
  out << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
  for (const auto& [src, dst] : c.profile_pairs) {
    out << YAML::Flow << YAML::BeginSeq << src << dst << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "report" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "low_threshold" << YAML::Value << c.low_threshold;
  out << YAML::Key << "high_threshold" << YAML::Value << c.high_threshold;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.output_dir.string();
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace leosim

#include <algorithm>
#include <cctype>
#include <functional>
#include <utility>

#include <fmt/format.h>

#include "leosim/error.hpp"
#include "leosim/orbital.hpp"

namespace leosim::presets {

namespace {

ShellSpec Shell(double altitude_km, double inclination_deg, int planes,
                int slots, int phasing, double raan_spread_deg) {
  ShellSpec s;
  s.altitude_km = altitude_km;
  s.inclination_deg = inclination_deg;
  s.num_planes = planes;
  s.sats_per_plane = slots;
  s.phasing_factor = phasing;
  s.raan_spread_deg = raan_spread_deg;
  return s;
}

constexpr double kStar = 180;
constexpr double kDelta = 360;

}  // namespace

// 66 satellites, 6 polar planes of 11.
ConstellationSpec Iridium() {
  return {"iridium", {Shell(780, 86.4, 6, 11, 2, kStar)}};
}

// 48 satellites at about 1400 km; 8 x 6 Walker delta at 52 degrees.
ConstellationSpec Globalstar() {
  return {"globalstar", {Shell(1400, 52, 8, 6, 1, kDelta)}};
}

// 720 satellites, 18 near-polar planes of 40 at 1200 km.
ConstellationSpec OneWeb() {
  return {"oneweb", {Shell(1200, 87.9, 18, 40, 1, kStar)}};
}

// 1584 satellites as the 72 x 22 first shell at 550 km / 53 degrees.
ConstellationSpec StarlinkSim() {
  return {"starlink_sim", {Shell(550, 53, 72, 22, 1, kDelta)}};
}

// Three inclined shells: 1156 + 1296 + 784 = 3236.
ConstellationSpec Kuiper() {
  return {"kuiper",
          {Shell(630, 51.9, 34, 34, 1, kDelta),
           Shell(610, 42, 36, 36, 1, kDelta),
           Shell(590, 33, 28, 28, 1, kDelta)}};
}

// 300 satellites: 80 polar (8 x 10) plus 220 inclined (20 x 11). Only the
// total and the "about 80 polar" split are published; the plane layout is
// an assumption.
ConstellationSpec Telesat() {
  return {"telesat",
          {Shell(1015, 99.5, 8, 10, 1, kStar),
           Shell(1325, 37.4, 20, 11, 1, kDelta)}};
}

namespace {

const std::vector<std::pair<std::string, std::function<ConstellationSpec()>>>&
Registry() {
  static const std::vector<
      std::pair<std::string, std::function<ConstellationSpec()>>>
      registry = {{"iridium", Iridium},       {"globalstar", Globalstar},
                  {"oneweb", OneWeb},         {"starlink_sim", StarlinkSim},
                  {"kuiper", Kuiper},         {"telesat", Telesat}};
  return registry;
}

}  // namespace

std::vector<std::string> Names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : Registry()) names.push_back(name);
  return names;
}

ConstellationSpec ByName(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const auto& [key, make] : Registry()) {
    if (key == lower) return make();
  }
  throw InvalidArgument(fmt::format("unknown constellation preset '{}' (known: {})",
                                    name, fmt::join(Names(), ", ")));
}

}  // namespace leosim::presets

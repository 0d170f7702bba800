#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "leosim/orbital.hpp"

namespace leosim {

inline constexpr double kSpeedOfLightKmPerS = 299792.458;

using NodeIndex = std::uint32_t;
using LinkIndex = std::uint32_t;
// Direction-qualified link: 2 * link + (traversed from endpoint b to a).
using DirectedLinkId = std::uint32_t;

struct SatelliteId {
  int shell = 0;
  int plane = 0;
  int slot = 0;
  auto operator<=>(const SatelliteId&) const = default;
};

struct GroundId {
  int station = 0;
  auto operator<=>(const GroundId&) const = default;
};

// Satellites order before ground stations.
using NodeId = std::variant<SatelliteId, GroundId>;

std::string NodeLabel(const NodeId& id);

enum class LinkKind { kIsl, kGsl };

// Undirected link, a < b. Capacity applies to each direction independently.
struct Link {
  NodeIndex a = 0;
  NodeIndex b = 0;
  double delay_ms = 0;
  double capacity = 0;  // capacity units, 1 unit = 1 Mbit/s
  LinkKind kind = LinkKind::kIsl;
};

inline DirectedLinkId Directed(LinkIndex link, const Link& l, NodeIndex from) {
  return 2 * link + (from == l.a ? 0u : 1u);
}
inline LinkIndex UndirectedOf(DirectedLinkId id) { return id / 2; }

struct GroundStation {
  std::string name;
  double lat_deg = 0;
  double lon_deg = 0;
  double min_elevation_deg = 25;

  void Validate() const;
};

struct GridPolicy {
  bool isl_enabled = true;  // false models relay-only constellations
  bool seam_links = true;
  // Inter-plane links are dropped when either endpoint's subpoint latitude
  // exceeds this magnitude. 90 disables the cutoff.
  double polar_cutoff_deg = 70;
};

struct CapacityProfile {
  double isl = 400;
  double gsl = 400;

  // 100 Gbit/s optical ISLs.
  static CapacityProfile Laser() { return {100000, 400}; }
};

double LinkDelayMs(const Vec3& a, const Vec3& b);
// Throws when the positions are in different frames.
double LinkDelayMs(const SatPosition& a, const SatPosition& b);

// +Grid ISLs. Endpoints are indices into `elements`.
std::vector<Link> BuildIslGrid(const ConstellationSpec& spec,
                               std::span<const SatElements> elements, double t_s,
                               const GridPolicy& policy, double capacity = 400);

struct GroundAttachment {
  std::vector<Link> links;  // GSL endpoints: satellite index, station node
  std::vector<int> unattached;
  std::vector<std::string> warnings;
};

// Station s is node `first_station_node + s`. Each station is single-homed
// on its highest-elevation visible satellite.
GroundAttachment AttachGroundStations(std::span<const SatElements> elements,
                                      double t_s,
                                      std::span<const GroundStation> stations,
                                      NodeIndex first_station_node,
                                      double capacity = 400);

struct Adjacent {
  NodeIndex neighbor;
  LinkIndex link;
};

class TopologySnapshot {
 public:
  // Validates simplicity (no self loops or parallel links) and sorts each
  // adjacency list by neighbor index.
  static TopologySnapshot FromLinks(double time_s, std::vector<NodeId> nodes,
                                    std::vector<Link> links);

  double time_s() const { return time_s_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t directed_link_count() const { return 2 * links_.size(); }

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const NodeId& node(NodeIndex i) const { return nodes_[i]; }
  const Link& link(LinkIndex i) const { return links_[i]; }
  std::span<const Adjacent> neighbors(NodeIndex n) const { return adjacency_[n]; }

  std::optional<LinkIndex> FindLink(NodeIndex u, NodeIndex v) const;
  double Capacity(DirectedLinkId id) const { return links_[id / 2].capacity; }

  // Node of ground station `station`; throws when absent.
  NodeIndex StationNode(int station) const;
  std::optional<NodeIndex> SatelliteNode(const SatelliteId& id) const;

  std::vector<std::string> station_names;
  std::vector<int> unattached_stations;
  std::vector<std::string> warnings;
  // Earth-fixed node positions at time_s, empty for synthetic graphs.
  std::vector<Vec3> positions;

  // FNV-1a over node ids and link endpoints/delay/capacity bit patterns.
  std::uint64_t ContentHash() const;

 private:
  double time_s_ = 0;
  std::vector<NodeId> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<Adjacent>> adjacency_;
};

TopologySnapshot BuildSnapshot(const ConstellationSpec& spec,
                               std::span<const GroundStation> stations,
                               double t_s, const GridPolicy& policy,
                               const CapacityProfile& capacity);

}  // namespace leosim

#include "leosim/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "leosim/error.hpp"

namespace leosim {

std::string NodeLabel(const NodeId& id) {
  if (const auto* sat = std::get_if<SatelliteId>(&id)) {
    return fmt::format("sat:{}/{}/{}", sat->shell, sat->plane, sat->slot);
  }
  return fmt::format("gs:{}", std::get<GroundId>(id).station);
}

void GroundStation::Validate() const {
  if (std::abs(lat_deg) > 90 || std::abs(lon_deg) > 180) {
    throw InvalidArgument(fmt::format(
        "station '{}' has invalid coordinates ({}, {})", name, lat_deg, lon_deg));
  }
  if (min_elevation_deg < 0 || min_elevation_deg >= 90) {
    throw InvalidArgument(fmt::format(
        "station '{}' min_elevation_deg must be in [0, 90), got {}", name,
        min_elevation_deg));
  }
}

double LinkDelayMs(const Vec3& a, const Vec3& b) {
  return (a - b).Norm() / kSpeedOfLightKmPerS * 1000.0;
}

double LinkDelayMs(const SatPosition& a, const SatPosition& b) {
  if (a.frame != b.frame) {
    throw InvalidArgument("link_delay endpoints are in different frames");
  }
  return LinkDelayMs(a.r, b.r);
}

namespace {

double LatitudeDeg(const Vec3& r) {
  return RadToDeg(std::atan2(r.z, std::sqrt(r.x * r.x + r.y * r.y)));
}

Link MakeLink(NodeIndex u, NodeIndex v, double delay_ms, double capacity,
              LinkKind kind) {
  Link l;
  l.a = std::min(u, v);
  l.b = std::max(u, v);
  l.delay_ms = delay_ms;
  l.capacity = capacity;
  l.kind = kind;
  return l;
}

}  // namespace

std::vector<Link> BuildIslGrid(const ConstellationSpec& spec,
                               std::span<const SatElements> elements,
                               double t_s, const GridPolicy& policy,
                               double capacity) {
  if (!(capacity > 0)) {
    throw InvalidArgument(fmt::format("ISL capacity must be > 0, got {}", capacity));
  }
  if (static_cast<int>(elements.size()) != spec.satellite_count()) {
    throw InvalidArgument("element count does not match constellation spec");
  }
  std::vector<Link> links;
  if (!policy.isl_enabled) return links;

  std::vector<Vec3> pos(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    pos[i] = Propagate(elements[i], t_s).r;
  }

  NodeIndex base = 0;
  for (const ShellSpec& shell : spec.shells) {
    const int planes = shell.num_planes;
    const int slots = shell.sats_per_plane;
    if (slots < 3) {
      throw InvalidArgument(fmt::format(
          "+Grid needs at least 3 satellites per plane, shell has {}", slots));
    }
    auto index = [&](int p, int s) {
      return base + static_cast<NodeIndex>(p * slots + s);
    };
    auto add = [&](NodeIndex u, NodeIndex v) {
      links.push_back(MakeLink(u, v, LinkDelayMs(pos[u], pos[v]), capacity,
                               LinkKind::kIsl));
    };
    for (int p = 0; p < planes; ++p) {
      for (int s = 0; s < slots; ++s) add(index(p, s), index(p, (s + 1) % slots));
    }
    // Plane p links to p + 1; the wrap-around pair (planes-1, 0) is the seam.
    int inter_pairs = planes - 1;
    if (planes > 2 && policy.seam_links) inter_pairs = planes;
    for (int p = 0; p < inter_pairs; ++p) {
      const int q = (p + 1) % planes;
      for (int s = 0; s < slots; ++s) {
        const NodeIndex u = index(p, s), v = index(q, s);
        if (std::abs(LatitudeDeg(pos[u])) > policy.polar_cutoff_deg ||
            std::abs(LatitudeDeg(pos[v])) > policy.polar_cutoff_deg) {
          continue;
        }
        add(u, v);
      }
    }
    base += static_cast<NodeIndex>(planes * slots);
  }
  return links;
}

GroundAttachment AttachGroundStations(std::span<const SatElements> elements,
                                      double t_s,
                                      std::span<const GroundStation> stations,
                                      NodeIndex first_station_node,
                                      double capacity) {
  if (stations.empty()) throw InvalidArgument("station list is empty");
  if (!(capacity > 0)) {
    throw InvalidArgument(fmt::format("GSL capacity must be > 0, got {}", capacity));
  }
  std::vector<Vec3> pos(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    pos[i] = Propagate(elements[i], t_s, Frame::kEarthFixed).r;
  }
  GroundAttachment out;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    const GroundStation& gs = stations[s];
    gs.Validate();
    const Vec3 site = EarthFixedPoint(gs.lat_deg, gs.lon_deg, 0).r;
    int best = -1;
    double best_elevation = -91;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const double el = ElevationDeg(site, pos[i]);
      if (el >= gs.min_elevation_deg && el > best_elevation) {
        best_elevation = el;
        best = static_cast<int>(i);
      }
    }
    const NodeIndex station_node = first_station_node + static_cast<NodeIndex>(s);
    if (best < 0) {
      out.unattached.push_back(static_cast<int>(s));
      out.warnings.push_back(fmt::format(
          "unattached station '{}': no satellite above {} deg elevation at t={}",
          gs.name, gs.min_elevation_deg, t_s));
      continue;
    }
    out.links.push_back(MakeLink(static_cast<NodeIndex>(best), station_node,
                                 LinkDelayMs(site, pos[best]), capacity,
                                 LinkKind::kGsl));
  }
  return out;
}

TopologySnapshot TopologySnapshot::FromLinks(double time_s,
                                             std::vector<NodeId> nodes,
                                             std::vector<Link> links) {
  TopologySnapshot snap;
  snap.time_s_ = time_s;
  snap.nodes_ = std::move(nodes);
  snap.links_ = std::move(links);
  for (std::size_t i = 1; i < snap.nodes_.size(); ++i) {
    if (!(snap.nodes_[i - 1] < snap.nodes_[i])) {
      throw InvalidArgument("snapshot nodes must be strictly increasing");
    }
  }
  snap.adjacency_.assign(snap.nodes_.size(), {});
  for (LinkIndex i = 0; i < snap.links_.size(); ++i) {
    Link& l = snap.links_[i];
    if (l.a > l.b) std::swap(l.a, l.b);
    if (l.a == l.b) {
      throw InvalidArgument(fmt::format("self-loop on node {}", l.a));
    }
    if (l.b >= snap.nodes_.size()) {
      throw InvalidArgument(fmt::format("link endpoint {} out of range", l.b));
    }
    if (!(l.capacity > 0) || l.delay_ms < 0) {
      throw InvalidArgument(fmt::format(
          "link {}-{} needs capacity > 0 and delay >= 0", l.a, l.b));
    }
    snap.adjacency_[l.a].push_back({l.b, i});
    snap.adjacency_[l.b].push_back({l.a, i});
  }
  for (auto& adj : snap.adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Adjacent& x, const Adjacent& y) {
      return x.neighbor < y.neighbor;
    });
    for (std::size_t k = 1; k < adj.size(); ++k) {
      if (adj[k].neighbor == adj[k - 1].neighbor) {
        throw InvalidArgument(fmt::format("parallel links to node {}",
                                          adj[k].neighbor));
      }
    }
  }
  return snap;
}

std::optional<LinkIndex> TopologySnapshot::FindLink(NodeIndex u,
                                                    NodeIndex v) const {
  const auto& adj = adjacency_[u];
  auto it = std::lower_bound(
      adj.begin(), adj.end(), v,
      [](const Adjacent& a, NodeIndex n) { return a.neighbor < n; });
  if (it == adj.end() || it->neighbor != v) return std::nullopt;
  return it->link;
}

NodeIndex TopologySnapshot::StationNode(int station) const {
  const NodeId key = GroundId{station};
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), key);
  if (it == nodes_.end() || *it != key) {
    throw InvalidArgument(fmt::format("station {} not in snapshot", station));
  }
  return static_cast<NodeIndex>(it - nodes_.begin());
}

std::optional<NodeIndex> TopologySnapshot::SatelliteNode(
    const SatelliteId& id) const {
  const NodeId key = id;
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), key);
  if (it == nodes_.end() || *it != key) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

namespace {

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  }
  void U64(std::uint64_t v) { Bytes(&v, sizeof v); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
};

}  // namespace

std::uint64_t TopologySnapshot::ContentHash() const {
  Fnv1a f;
  f.F64(time_s_);
  f.U64(nodes_.size());
  for (const NodeId& n : nodes_) {
    f.U64(n.index());
    if (const auto* sat = std::get_if<SatelliteId>(&n)) {
      f.U64(sat->shell);
      f.U64(sat->plane);
      f.U64(sat->slot);
    } else {
      f.U64(std::get<GroundId>(n).station);
    }
  }
  f.U64(links_.size());
  for (const Link& l : links_) {
    f.U64(l.a);
    f.U64(l.b);
    f.F64(l.delay_ms);
    f.F64(l.capacity);
    f.U64(static_cast<std::uint64_t>(l.kind));
  }
  return f.h;
}

TopologySnapshot BuildSnapshot(const ConstellationSpec& spec,
                               std::span<const GroundStation> stations,
                               double t_s, const GridPolicy& policy,
                               const CapacityProfile& capacity) {
  if (t_s < 0) throw InvalidArgument("snapshot time must be >= 0");
  const std::vector<SatElements> elements = BuildConstellation(spec);
  std::vector<NodeId> nodes;
  nodes.reserve(elements.size() + stations.size());
  for (const SatElements& e : elements) {
    nodes.push_back(SatelliteId{e.shell_index, e.plane_index, e.slot_index});
  }
  for (std::size_t s = 0; s < stations.size(); ++s) {
    nodes.push_back(GroundId{static_cast<int>(s)});
  }

  std::vector<Link> links = BuildIslGrid(spec, elements, t_s, policy, capacity.isl);
  GroundAttachment ground;
  if (!stations.empty()) {
    ground = AttachGroundStations(elements, t_s, stations,
                                  static_cast<NodeIndex>(elements.size()),
                                  capacity.gsl);
    links.insert(links.end(), ground.links.begin(), ground.links.end());
  }

  TopologySnapshot snap = TopologySnapshot::FromLinks(t_s, std::move(nodes),
                                                      std::move(links));
  snap.unattached_stations = std::move(ground.unattached);
  snap.warnings = std::move(ground.warnings);
  for (const GroundStation& gs : stations) snap.station_names.push_back(gs.name);
  snap.positions.reserve(snap.node_count());
  for (const SatElements& e : elements) {
    snap.positions.push_back(Propagate(e, t_s, Frame::kEarthFixed).r);
  }
  for (const GroundStation& gs : stations) {
    snap.positions.push_back(EarthFixedPoint(gs.lat_deg, gs.lon_deg, 0).r);
  }
  return snap;
}

}  // namespace leosim

#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "leosim/flow.hpp"
#include "leosim/topology.hpp"

namespace fixture {

struct Edge {
  int a;
  int b;
  double delay_ms;
  double capacity = 400;
};

// Satellites take indices [0, sats); ground stations [sats, sats + stations).
inline leosim::TopologySnapshot Graph(int sats, int stations, const std::vector<Edge>& edges) {
  std::vector<leosim::NodeId> nodes;
  for (int i = 0; i < sats; ++i) nodes.push_back(leosim::SatelliteId{0, 0, i});
  for (int i = 0; i < stations; ++i) nodes.push_back(leosim::GroundId{i});
  std::vector<leosim::Link> links;
  for (const Edge& e : edges) {
    leosim::Link l;
    l.a = static_cast<leosim::NodeIndex>(std::min(e.a, e.b));
    l.b = static_cast<leosim::NodeIndex>(std::max(e.a, e.b));
    l.delay_ms = e.delay_ms;
    l.capacity = e.capacity;
    l.kind = l.b >= static_cast<leosim::NodeIndex>(sats) ? leosim::LinkKind::kGsl
                                                         : leosim::LinkKind::kIsl;
    links.push_back(l);
  }
  auto snap = leosim::TopologySnapshot::FromLinks(0, std::move(nodes), std::move(links));
  for (int i = 0; i < stations; ++i) snap.station_names.push_back("gs" + std::to_string(i));
  return snap;
}

inline leosim::FlowDemand Demand(std::size_t id, int src, int dst, double rate) {
  leosim::FlowDemand d;
  d.id = id;
  d.src = src;
  d.dst = dst;
  d.offered_rate = rate;
  return d;
}

inline std::vector<leosim::NodeIndex> Nodes(const leosim::Path& p) { return p.nodes; }

}  // namespace fixture

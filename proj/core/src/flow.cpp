#include "leosim/flow.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "leosim/error.hpp"

namespace leosim {

Path MakePath(const TopologySnapshot& snap, std::span<const NodeIndex> nodes) {
  Path path;
  path.nodes.assign(nodes.begin(), nodes.end());
  if (nodes.empty()) return path;
  std::vector<char> seen(snap.node_count(), 0);
  path.bottleneck_capacity = nodes.size() > 1 ? 1e300 : 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= snap.node_count() || seen[nodes[i]]) {
      throw InvalidArgument(fmt::format("path revisits or leaves graph at node {}",
                                        nodes[i]));
    }
    seen[nodes[i]] = 1;
    if (i == 0) continue;
    auto link = snap.FindLink(nodes[i - 1], nodes[i]);
    if (!link) {
      throw InvalidArgument(fmt::format("no link between nodes {} and {}",
                                        nodes[i - 1], nodes[i]));
    }
    path.links.push_back(*link);
    path.total_delay_ms += snap.link(*link).delay_ms;
    path.bottleneck_capacity =
        std::min(path.bottleneck_capacity, snap.link(*link).capacity);
  }
  return path;
}

std::vector<DirectedLinkId> DirectedLinks(const TopologySnapshot& snap,
                                          const Path& path) {
  std::vector<DirectedLinkId> out;
  out.reserve(path.links.size());
  for (std::size_t i = 0; i < path.links.size(); ++i) {
    out.push_back(Directed(path.links[i], snap.link(path.links[i]), path.nodes[i]));
  }
  return out;
}

std::vector<FlowDemand> OrderDemands(std::span<const FlowDemand> demands) {
  std::vector<FlowDemand> out(demands.begin(), demands.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const FlowDemand& x, const FlowDemand& y) {
                     if (x.src != y.src) return x.src < y.src;
                     if (x.dst != y.dst) return x.dst < y.dst;
                     if (x.offered_rate != y.offered_rate) {
                       return x.offered_rate > y.offered_rate;
                     }
                     return x.id < y.id;
                   });
  return out;
}

void LinkLoadMap::AddPath(const TopologySnapshot& snap, const Path& path,
                          double rate) {
  for (DirectedLinkId id : DirectedLinks(snap, path)) load_[id] += rate;
}

double LinkLoadMap::MaxUtilization(const TopologySnapshot& snap) const {
  double best = 0;
  for (DirectedLinkId id = 0; id < load_.size(); ++id) {
    best = std::max(best, load_[id] / snap.Capacity(id));
  }
  return best;
}

LinkLoadMap OfferedLoads(const TopologySnapshot& snap,
                         const FlowAssignment& assignment) {
  LinkLoadMap loads(snap.directed_link_count());
  for (const AssignedFlow& f : assignment.flows) {
    if (f.routed) loads.AddPath(snap, f.path, f.demand.offered_rate);
  }
  return loads;
}

}  // namespace leosim

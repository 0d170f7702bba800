#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "leosim/topology.hpp"

namespace leosim {

// Loopless node walk through a snapshot.
struct Path {
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;  // links[i] joins nodes[i] and nodes[i + 1]
  double total_delay_ms = 0;
  double bottleneck_capacity = 0;

  std::size_t hops() const { return links.size(); }
  bool empty() const { return nodes.empty(); }
  bool operator==(const Path& o) const { return nodes == o.nodes; }
};

// Builds a Path from a node sequence, summing delays in path order. Throws
// when consecutive nodes are not adjacent or a node repeats.
Path MakePath(const TopologySnapshot& snap, std::span<const NodeIndex> nodes);

std::vector<DirectedLinkId> DirectedLinks(const TopologySnapshot& snap,
                                          const Path& path);

// Offered traffic between two ground stations (indices into the city /
// station list).
struct FlowDemand {
  std::size_t id = 0;
  int src = 0;
  int dst = 0;
  double offered_rate = 0;  // capacity units
};

// Sorted by (src, dst), then descending offered rate, then id.
std::vector<FlowDemand> OrderDemands(std::span<const FlowDemand> demands);

enum class RoutingPlane { kIp, kAuxiliary };

struct AssignedFlow {
  FlowDemand demand;
  bool routed = false;
  std::string reason;  // why the flow is unrouted
  Path path;
  // Scheduler-side rate: the offered rate, or the centrally allocated rate
  // for schedulers that allocate.
  double rate = 0;
  RoutingPlane plane = RoutingPlane::kIp;
  int deflections = 0;
};

struct FlowAssignment {
  std::string algorithm;
  std::vector<AssignedFlow> flows;  // in scheduler processing order
};

// Offered load per directed link.
class LinkLoadMap {
 public:
  explicit LinkLoadMap(std::size_t directed_links = 0)
      : load_(directed_links, 0.0) {}

  double operator[](DirectedLinkId id) const { return load_[id]; }
  void Add(DirectedLinkId id, double rate) { load_[id] += rate; }
  void AddPath(const TopologySnapshot& snap, const Path& path, double rate);
  std::size_t size() const { return load_.size(); }
  std::span<const double> values() const { return load_; }

  double Utilization(const TopologySnapshot& snap, DirectedLinkId id) const {
    return load_[id] / snap.Capacity(id);
  }
  double MaxUtilization(const TopologySnapshot& snap) const;

 private:
  std::vector<double> load_;
};

LinkLoadMap OfferedLoads(const TopologySnapshot& snap,
                         const FlowAssignment& assignment);

}  // namespace leosim

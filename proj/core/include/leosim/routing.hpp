#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "leosim/flow.hpp"
#include "leosim/topology.hpp"

namespace leosim {

// Minimum-delay loopless path. Among equal-delay paths the one whose node
// sequence is lexicographically smallest wins. Throws Error(kUnreachable).
Path ShortestPath(const TopologySnapshot& snap, NodeIndex src, NodeIndex dst);

// Up to k minimum-delay loopless paths in nondecreasing delay order (Yen's
// deviation algorithm); ties ordered by node sequence. Throws
// Error(kUnreachable) when no path exists.
std::vector<Path> KShortestPaths(const TopologySnapshot& snap, NodeIndex src,
                                 NodeIndex dst, int k);

// Same, on the subgraph without the directed links whose mask entry is
// nonzero (mask indexed by DirectedLinkId, or empty for none).
std::vector<Path> KShortestPaths(const TopologySnapshot& snap, NodeIndex src,
                                 NodeIndex dst, int k,
                                 std::span<const char> excluded);

// Paths within (1 + epsilon) of the minimum delay, order preserved. `paths`
// must be sorted by delay.
std::vector<Path> EquivalentPaths(std::span<const Path> paths, double epsilon);

// Memoized k-shortest paths per (src, dst) node pair. Prefix stability makes
// a single deep search serve every smaller k.
class PathCache {
 public:
  PathCache(const TopologySnapshot& snap, int depth) : snap_(snap), depth_(depth) {}

  // Fills the cache for all pairs using up to `threads` workers.
  void Prefetch(std::span<const std::pair<NodeIndex, NodeIndex>> pairs,
                int threads);

  // First min(k, depth) paths; empty when unreachable.
  std::vector<Path> Get(NodeIndex src, NodeIndex dst, int k);
  int depth() const { return depth_; }

 private:
  const std::vector<Path>& Lookup(NodeIndex src, NodeIndex dst);

  const TopologySnapshot& snap_;
  int depth_;
  std::mutex mu_;
  std::map<std::pair<NodeIndex, NodeIndex>, std::vector<Path>> cache_;
};

// ---------------------------------------------------------------------------
// Schedulers. Each consumes demands in OrderDemands() order and never throws
// for an individual unroutable flow; such flows come back with routed=false.

FlowAssignment OspfAssign(const TopologySnapshot& snap,
                          std::span<const FlowDemand> demands,
                          PathCache* cache = nullptr);

struct MfssParams {
  double theta = 0.7;    // congestion threshold on EWMA utilization
  double alpha = 0.5;    // EWMA weight of the newest sample
  double epsilon = 0.2;  // equivalent-path delay tolerance
  int k = 50;            // equivalent-path search width
  // Return to the IP plane once every EWMA falls below theta / 2.
  bool deactivate_when_clear = true;
  // When no equivalent path avoids every flagged link, or the best one would
  // overflow, search again without the flagged and overflowing links. The
  // delay budget stays (1 + epsilon) times the unconstrained optimum.
  bool detour_search = true;

  void Validate() const;
};

struct MfssState {
  explicit MfssState(MfssParams p = {}) : params(p) { params.Validate(); }

  MfssParams params;
  std::vector<double> ewma;  // per directed link, sized lazily
  bool auxiliary_active = false;
};

// EWMA update e <- alpha * load / capacity + (1 - alpha) * e on every directed
// link; returns links with e >= theta in ascending id order.
std::vector<DirectedLinkId> DetectCongestion(MfssState& state,
                                             const LinkLoadMap& loads,
                                             std::span<const double> capacities);
std::vector<DirectedLinkId> DetectCongestion(MfssState& state,
                                             const LinkLoadMap& loads,
                                             const TopologySnapshot& snap);

// Per-directed-link capacity vector.
std::vector<double> DirectedCapacities(const TopologySnapshot& snap);

FlowAssignment MfssAssign(const TopologySnapshot& snap,
                          std::span<const FlowDemand> demands, MfssState& state,
                          PathCache* cache = nullptr);

struct ElbParams {
  double busy_threshold = 0.7;
  double deflection_fraction = 0.5;
  int ttl = 32;
  std::uint64_t seed = 1;

  void Validate() const;
};

FlowAssignment ElbAssign(const TopologySnapshot& snap,
                         std::span<const FlowDemand> demands,
                         const ElbParams& params, PathCache* cache = nullptr);

struct B4Params {
  int k = 4;

  void Validate() const;
};

struct B4Allocation {
  FlowAssignment assignment;  // single-path binding
  // Per flow (assignment order): candidate paths and the rate on each.
  std::vector<std::vector<Path>> candidates;
  std::vector<std::vector<double>> split;
  std::vector<double> total_rate;
};

B4Allocation B4Allocate(const TopologySnapshot& snap,
                        std::span<const FlowDemand> demands,
                        const B4Params& params, PathCache* cache = nullptr);

inline FlowAssignment B4Assign(const TopologySnapshot& snap,
                               std::span<const FlowDemand> demands,
                               const B4Params& params,
                               PathCache* cache = nullptr) {
  return B4Allocate(snap, demands, params, cache).assignment;
}

}  // namespace leosim

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>

#include <fmt/format.h>

#include "leosim/error.hpp"
#include "leosim/routing.hpp"

namespace leosim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Endpoints {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  std::string error;
};

Endpoints Resolve(const TopologySnapshot& snap, const FlowDemand& d) {
  Endpoints e;
  try {
    e.src = snap.StationNode(d.src);
    e.dst = snap.StationNode(d.dst);
  } catch (const Error& err) {
    e.error = err.what();
  }
  if (e.error.empty() && e.src == e.dst) e.error = "source equals destination";
  return e;
}

// Up to k shortest paths, empty when unreachable.
std::vector<Path> Candidates(const TopologySnapshot& snap, PathCache* cache,
                             NodeIndex src, NodeIndex dst, int k) {
  if (cache != nullptr && cache->depth() >= k) return cache->Get(src, dst, k);
  try {
    return KShortestPaths(snap, src, dst, k);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnreachable) throw;
  }
  return {};
}

AssignedFlow Unrouted(const FlowDemand& d, std::string reason) {
  AssignedFlow f;
  f.demand = d;
  f.reason = std::move(reason);
  return f;
}

AssignedFlow Routed(const FlowDemand& d, Path path, RoutingPlane plane) {
  AssignedFlow f;
  f.demand = d;
  f.routed = true;
  f.path = std::move(path);
  f.rate = d.offered_rate;
  f.plane = plane;
  return f;
}

std::string UnreachableReason(const TopologySnapshot& snap, const FlowDemand& d) {
  auto name = [&](int s) {
    return s >= 0 && s < static_cast<int>(snap.station_names.size())
               ? snap.station_names[s]
               : fmt::format("{}", s);
  };
  return fmt::format("unreachable: {} -> {}", name(d.src), name(d.dst));
}

// Distances to one destination plus the deterministic next-hop rule shared
// with ShortestPath: the smallest neighbor on a shortest path.
class DestinationTree {
 public:
  DestinationTree(const TopologySnapshot& snap, NodeIndex dst)
      : snap_(snap), dist_(snap.node_count(), kInf) {
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[dst] = 0;
    heap.push({0.0, dst});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_[u]) continue;
      for (const Adjacent& adj : snap.neighbors(u)) {
        const double nd = d + snap.link(adj.link).delay_ms;
        if (nd < dist_[adj.neighbor]) {
          dist_[adj.neighbor] = nd;
          heap.push({nd, adj.neighbor});
        }
      }
    }
  }

  bool Reachable(NodeIndex u) const { return dist_[u] != kInf; }

  std::optional<NodeIndex> NextHop(NodeIndex u) const {
    for (const Adjacent& adj : snap_.neighbors(u)) {
      const double dv = dist_[adj.neighbor];
      if (dv < dist_[u] && dv + snap_.link(adj.link).delay_ms == dist_[u]) {
        return adj.neighbor;
      }
    }
    return std::nullopt;
  }

 private:
  const TopologySnapshot& snap_;
  std::vector<double> dist_;
};

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double UnitHash(std::uint64_t seed, std::uint64_t flow, std::uint64_t node) {
  const std::uint64_t h =
      SplitMix64(SplitMix64(SplitMix64(seed) ^ flow) ^ (node * 0x2545f4914f6cdd1dULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> DirectedCapacities(const TopologySnapshot& snap) {
  std::vector<double> caps(snap.directed_link_count());
  for (DirectedLinkId id = 0; id < caps.size(); ++id) caps[id] = snap.Capacity(id);
  return caps;
}

// --------------------------------------------------------------------- OSPF

FlowAssignment OspfAssign(const TopologySnapshot& snap,
                          std::span<const FlowDemand> demands,
                          PathCache* cache) {
  FlowAssignment out;
  out.algorithm = "ospf";
  for (const FlowDemand& d : OrderDemands(demands)) {
    const Endpoints ends = Resolve(snap, d);
    if (!ends.error.empty()) {
      out.flows.push_back(Unrouted(d, ends.error));
      continue;
    }
    std::vector<Path> paths = Candidates(snap, cache, ends.src, ends.dst, 1);
    if (paths.empty()) {
      out.flows.push_back(Unrouted(d, UnreachableReason(snap, d)));
      continue;
    }
    out.flows.push_back(Routed(d, std::move(paths.front()), RoutingPlane::kIp));
  }
  return out;
}

// --------------------------------------------------------------------- MFSS

void MfssParams::Validate() const {
  if (!(theta > 0 && theta < 1)) {
    throw InvalidArgument(fmt::format("mfss.theta must be in (0, 1), got {}", theta));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    throw InvalidArgument(fmt::format("mfss.alpha must be in (0, 1], got {}", alpha));
  }
  if (!(epsilon >= 0)) {
    throw InvalidArgument(fmt::format("mfss.epsilon must be >= 0, got {}", epsilon));
  }
  if (k < 1) throw InvalidArgument(fmt::format("mfss.k must be >= 1, got {}", k));
}

std::vector<DirectedLinkId> DetectCongestion(MfssState& state,
                                             const LinkLoadMap& loads,
                                             std::span<const double> capacities) {
  if (loads.size() != capacities.size()) {
    throw InvalidArgument("load map and capacity vector differ in size");
  }
  if (state.ewma.size() != capacities.size()) {
    state.ewma.assign(capacities.size(), 0.0);
  }
  const double alpha = state.params.alpha;
  std::vector<DirectedLinkId> flagged;
  for (DirectedLinkId id = 0; id < capacities.size(); ++id) {
    if (!(capacities[id] > 0)) {
      throw InvalidArgument(fmt::format("link {} has capacity {}", id, capacities[id]));
    }
    const double sample = loads[id] / capacities[id];
    state.ewma[id] = alpha * sample + (1 - alpha) * state.ewma[id];
    if (state.ewma[id] >= state.params.theta) flagged.push_back(id);
  }
  return flagged;
}

std::vector<DirectedLinkId> DetectCongestion(MfssState& state,
                                             const LinkLoadMap& loads,
                                             const TopologySnapshot& snap) {
  return DetectCongestion(state, loads, DirectedCapacities(snap));
}

FlowAssignment MfssAssign(const TopologySnapshot& snap,
                          std::span<const FlowDemand> demands, MfssState& state,
                          PathCache* cache) {
  state.params.Validate();
  const MfssParams& params = state.params;
  const std::vector<double> caps = DirectedCapacities(snap);
  LinkLoadMap loads(caps.size());
  std::vector<char> flagged(caps.size(), 0);
  if (state.ewma.size() != caps.size()) state.ewma.assign(caps.size(), 0.0);

  FlowAssignment out;
  out.algorithm = "mfss";
  for (const FlowDemand& d : OrderDemands(demands)) {
    const Endpoints ends = Resolve(snap, d);
    if (!ends.error.empty()) {
      out.flows.push_back(Unrouted(d, ends.error));
      continue;
    }

    AssignedFlow flow;
    if (!state.auxiliary_active) {
      std::vector<Path> sp = Candidates(snap, cache, ends.src, ends.dst, 1);
      if (sp.empty()) {
        out.flows.push_back(Unrouted(d, UnreachableReason(snap, d)));
        continue;
      }
      flow = Routed(d, std::move(sp.front()), RoutingPlane::kIp);
    } else {
      const std::vector<Path> paths =
          Candidates(snap, cache, ends.src, ends.dst, params.k);
      if (paths.empty()) {
        out.flows.push_back(Unrouted(d, UnreachableReason(snap, d)));
        continue;
      }
      const std::vector<Path> eps = EquivalentPaths(paths, params.epsilon);
      // Utilization of the most loaded link on the path once this flow joins.
      auto post_max = [&](const Path& p) {
        double worst = 0;
        for (DirectedLinkId id : DirectedLinks(snap, p)) {
          worst = std::max(worst, (loads[id] + d.offered_rate) / caps[id]);
        }
        return worst;
      };
      auto avoids_flagged = [&](const Path& p) {
        for (DirectedLinkId id : DirectedLinks(snap, p)) {
          if (flagged[id]) return false;
        }
        return true;
      };
      auto pick = [&](const std::vector<Path>& options, bool need_clear) {
        int best = -1;
        double best_util = kInf;
        for (int i = 0; i < static_cast<int>(options.size()); ++i) {
          if (need_clear && !avoids_flagged(options[i])) continue;
          const double u = post_max(options[i]);
          if (u < best_util) {
            best_util = u;
            best = i;
          }
        }
        return best;
      };
      // Clean equivalent paths first; when none exists or the best one would
      // overflow a link, look for detours on the subgraph without flagged and
      // overflowing links, within the same delay budget.
      const int clean = pick(eps, true);
      std::optional<Path> chosen;
      double chosen_util = kInf;
      if (clean >= 0) {
        chosen = eps[clean];
        chosen_util = post_max(eps[clean]);
      }
      if (params.detour_search && chosen_util > 1.0) {
        std::vector<char> mask(flagged);
        for (DirectedLinkId id = 0; id < mask.size(); ++id) {
          if ((loads[id] + d.offered_rate) / caps[id] > 1.0) mask[id] = 1;
        }
        std::vector<Path> detours;
        try {
          detours = KShortestPaths(snap, ends.src, ends.dst, params.k, mask);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUnreachable) throw;
        }
        const double limit = (1.0 + params.epsilon) * paths.front().total_delay_ms;
        for (const Path& p : detours) {
          if (p.total_delay_ms > limit) break;
          const double u = post_max(p);
          if (u < chosen_util) {
            chosen = p;
            chosen_util = u;
          }
        }
      }
      if (!chosen) chosen = eps[pick(eps, false)];
      flow = Routed(d, std::move(*chosen), RoutingPlane::kAuxiliary);
    }

    loads.AddPath(snap, flow.path, d.offered_rate);
    out.flows.push_back(std::move(flow));

    const std::vector<DirectedLinkId> hot = DetectCongestion(state, loads, caps);
    std::fill(flagged.begin(), flagged.end(), 0);
    for (DirectedLinkId id : hot) flagged[id] = 1;
    if (!hot.empty()) {
      state.auxiliary_active = true;
    } else if (state.auxiliary_active && params.deactivate_when_clear &&
               std::all_of(state.ewma.begin(), state.ewma.end(), [&](double e) {
                 return e < params.theta / 2;
               })) {
      state.auxiliary_active = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------------- ELB

void ElbParams::Validate() const {
  if (!(busy_threshold > 0)) {
    throw InvalidArgument(
        fmt::format("elb.busy_threshold must be > 0, got {}", busy_threshold));
  }
  if (!(deflection_fraction >= 0 && deflection_fraction <= 1)) {
    throw InvalidArgument(fmt::format(
        "elb.deflection_fraction must be in [0, 1], got {}", deflection_fraction));
  }
  if (ttl < 1) throw InvalidArgument(fmt::format("elb.ttl must be >= 1, got {}", ttl));
}

FlowAssignment ElbAssign(const TopologySnapshot& snap,
                         std::span<const FlowDemand> demands,
                         const ElbParams& params, PathCache* cache) {
  params.Validate();
  // Start from the state every node observes under plain shortest-path
  // forwarding; flows then re-forward one at a time against live loads.
  FlowAssignment base = OspfAssign(snap, demands, cache);
  LinkLoadMap loads = OfferedLoads(snap, base);
  std::unordered_map<NodeIndex, DestinationTree> trees;

  FlowAssignment out;
  out.algorithm = "elb";
  for (AssignedFlow& f : base.flows) {
    if (!f.routed) {
      out.flows.push_back(std::move(f));
      continue;
    }
    const double rate = f.demand.offered_rate;
    for (DirectedLinkId id : DirectedLinks(snap, f.path)) loads.Add(id, -rate);

    const NodeIndex src = f.path.nodes.front();
    const NodeIndex dst = f.path.nodes.back();
    const DestinationTree& tree = trees.try_emplace(dst, snap, dst).first->second;

    std::vector<char> visited(snap.node_count(), 0);
    std::vector<NodeIndex> walk{src};
    visited[src] = 1;
    int deflections = 0;
    bool ok = true;
    NodeIndex u = src;
    while (u != dst) {
      if (static_cast<int>(walk.size()) > params.ttl) {
        ok = false;
        break;
      }
      std::optional<NodeIndex> next = tree.NextHop(u);
      if (!next) {
        ok = false;
        break;
      }
      NodeIndex v = *next;
      const LinkIndex lv = *snap.FindLink(u, v);
      const double util = loads.Utilization(snap, Directed(lv, snap.link(lv), u));
      if (util > params.busy_threshold &&
          UnitHash(params.seed, f.demand.id, u) < params.deflection_fraction) {
        // One-hop view: the least utilized other outgoing link whose far end
        // would not hand the flow straight back.
        std::optional<NodeIndex> alt;
        double alt_util = kInf;
        for (const Adjacent& adj : snap.neighbors(u)) {
          const NodeIndex w = adj.neighbor;
          if (w == v || visited[w] || !tree.Reachable(w)) continue;
          if (w != dst && tree.NextHop(w) == u) continue;
          const double uw =
              loads.Utilization(snap, Directed(adj.link, snap.link(adj.link), u));
          if (uw < alt_util) {
            alt_util = uw;
            alt = w;
          }
        }
        if (alt) {
          v = *alt;
          ++deflections;
        }
      }
      if (visited[v]) {
        ok = false;
        break;
      }
      visited[v] = 1;
      walk.push_back(v);
      u = v;
    }

    AssignedFlow g = std::move(f);
    if (ok && deflections > 0) {
      g.path = MakePath(snap, walk);
      g.deflections = deflections;
    }
    loads.AddPath(snap, g.path, rate);
    out.flows.push_back(std::move(g));
  }
  return out;
}

// ----------------------------------------------------------------------- B4

void B4Params::Validate() const {
  if (k < 1) throw InvalidArgument(fmt::format("b4.k must be >= 1, got {}", k));
}

B4Allocation B4Allocate(const TopologySnapshot& snap,
                        std::span<const FlowDemand> demands,
                        const B4Params& params, PathCache* cache) {
  params.Validate();
  B4Allocation out;
  out.assignment.algorithm = "b4";
  const std::vector<FlowDemand> ordered = OrderDemands(demands);
  const std::size_t n = ordered.size();
  out.candidates.resize(n);
  out.split.resize(n);
  out.total_rate.assign(n, 0.0);

  std::vector<std::vector<std::vector<DirectedLinkId>>> cand_links(n);
  std::vector<std::string> reasons(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Endpoints ends = Resolve(snap, ordered[f]);
    if (!ends.error.empty()) {
      reasons[f] = ends.error;
      continue;
    }
    out.candidates[f] = Candidates(snap, cache, ends.src, ends.dst, params.k);
    if (out.candidates[f].empty()) reasons[f] = UnreachableReason(snap, ordered[f]);
    out.split[f].assign(out.candidates[f].size(), 0.0);
    for (const Path& p : out.candidates[f]) cand_links[f].push_back(DirectedLinks(snap, p));
  }

  // Water-filling: every unfrozen flow grows at the same rate on its first
  // candidate with residual capacity on all links.
  std::vector<double> residual = DirectedCapacities(snap);
  const std::vector<double> caps = residual;
  std::vector<int> active(n, 0);
  std::vector<char> frozen(n, 0);
  for (std::size_t f = 0; f < n; ++f) {
    if (out.candidates[f].empty() || !(ordered[f].offered_rate > 0)) frozen[f] = 1;
  }
  std::vector<int> users(residual.size(), 0);
  while (true) {
    for (std::size_t f = 0; f < n; ++f) {
      if (frozen[f]) continue;
      while (active[f] < static_cast<int>(cand_links[f].size())) {
        const auto& links = cand_links[f][active[f]];
        if (std::all_of(links.begin(), links.end(),
                        [&](DirectedLinkId id) { return residual[id] > 0; })) {
          break;
        }
        ++active[f];
      }
      if (active[f] == static_cast<int>(cand_links[f].size())) frozen[f] = 1;
    }
    std::fill(users.begin(), users.end(), 0);
    double delta = kInf;
    bool any = false;
    for (std::size_t f = 0; f < n; ++f) {
      if (frozen[f]) continue;
      any = true;
      delta = std::min(delta, ordered[f].offered_rate - out.total_rate[f]);
      for (DirectedLinkId id : cand_links[f][active[f]]) ++users[id];
    }
    if (!any) break;
    for (std::size_t id = 0; id < users.size(); ++id) {
      if (users[id] > 0) delta = std::min(delta, residual[id] / users[id]);
    }
    for (std::size_t id = 0; id < users.size(); ++id) {
      if (users[id] == 0) continue;
      residual[id] -= users[id] * delta;
      if (residual[id] <= 1e-12 * caps[id]) residual[id] = 0;
    }
    for (std::size_t f = 0; f < n; ++f) {
      if (frozen[f]) continue;
      out.total_rate[f] += delta;
      out.split[f][active[f]] += delta;
      if (out.total_rate[f] >= ordered[f].offered_rate * (1 - 1e-12)) frozen[f] = 1;
    }
  }

  for (std::size_t f = 0; f < n; ++f) {
    if (!reasons[f].empty()) {
      out.assignment.flows.push_back(Unrouted(ordered[f], reasons[f]));
      continue;
    }
    const auto& split = out.split[f];
    const std::size_t pick =
        std::max_element(split.begin(), split.end()) - split.begin();
    AssignedFlow a = Routed(ordered[f], out.candidates[f][pick], RoutingPlane::kIp);
    a.rate = out.total_rate[f];
    out.assignment.flows.push_back(std::move(a));
  }
  return out;
}

}  // namespace leosim

#include <algorithm>
#include <exception>
#include <limits>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "leosim/error.hpp"
#include "leosim/routing.hpp"
#include "parallel.hpp"

namespace leosim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dijkstra rooted at the target so the forward walk from the source can pick
// the lexicographically smallest successor on a shortest path.
class ReverseSearch {
 public:
  explicit ReverseSearch(const TopologySnapshot& snap)
      : snap_(snap),
        dist_(snap.node_count(), kInf),
        blocked_node_(snap.node_count(), 0),
        blocked_link_(snap.link_count(), 0) {}

  // Directed exclusions (by DirectedLinkId) that persist across ClearBlocks.
  void ExcludeDirected(std::span<const char> excluded) { excluded_ = excluded; }

  void BlockNode(NodeIndex n) { blocked_node_[n] = 1; }
  void BlockLink(LinkIndex l) { blocked_link_[l] = 1; }
  void ClearBlocks() {
    std::fill(blocked_node_.begin(), blocked_node_.end(), 0);
    std::fill(blocked_link_.begin(), blocked_link_.end(), 0);
  }

  // Node sequence from `source` to `target`, empty when unreachable.
  std::vector<NodeIndex> Find(NodeIndex source, NodeIndex target) {
    if (blocked_node_[source] || blocked_node_[target]) return {};
    Run(target, source);
    if (dist_[source] == kInf) return {};
    std::vector<NodeIndex> nodes{source};
    NodeIndex u = source;
    while (u != target) {
      NodeIndex next = u;
      for (const Adjacent& adj : snap_.neighbors(u)) {
        if (Blocked(adj, u)) continue;
        const double dv = dist_[adj.neighbor];
        if (dv != kInf && dv < dist_[u] &&
            dv + snap_.link(adj.link).delay_ms == dist_[u]) {
          next = adj.neighbor;
          break;
        }
      }
      if (next == u) {
        // Only zero-delay ties can strand the walk; fall back to any
        // strictly closer neighbor.
        double best = dist_[u];
        for (const Adjacent& adj : snap_.neighbors(u)) {
          if (Blocked(adj, u)) continue;
          if (dist_[adj.neighbor] < best) {
            best = dist_[adj.neighbor];
            next = adj.neighbor;
          }
        }
        if (next == u) return {};
      }
      nodes.push_back(next);
      u = next;
    }
    return nodes;
  }

 private:
  void Run(NodeIndex root, NodeIndex stop_at) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[root] = 0;
    heap.push({0.0, root});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_[u]) continue;
      if (u == stop_at) break;
      for (const Adjacent& adj : snap_.neighbors(u)) {
        // Backward relaxation: the forward hop is neighbor -> u.
        if (blocked_node_[adj.neighbor] || blocked_link_[adj.link]) continue;
        if (!excluded_.empty() &&
            excluded_[Directed(adj.link, snap_.link(adj.link), adj.neighbor)]) {
          continue;
        }
        const double nd = d + snap_.link(adj.link).delay_ms;
        if (nd < dist_[adj.neighbor]) {
          dist_[adj.neighbor] = nd;
          heap.push({nd, adj.neighbor});
        }
      }
    }
  }

  // Forward hop u -> adj.neighbor.
  bool Blocked(const Adjacent& adj, NodeIndex u) const {
    if (blocked_node_[adj.neighbor] || blocked_link_[adj.link]) return true;
    return !excluded_.empty() && excluded_[Directed(adj.link, snap_.link(adj.link), u)];
  }

  const TopologySnapshot& snap_;
  std::vector<double> dist_;
  std::vector<char> blocked_node_;
  std::vector<char> blocked_link_;
  std::span<const char> excluded_;
};

void CheckEndpoints(const TopologySnapshot& snap, NodeIndex src, NodeIndex dst) {
  if (src >= snap.node_count() || dst >= snap.node_count()) {
    throw InvalidArgument("path endpoint outside snapshot");
  }
  if (src == dst) throw InvalidArgument("path source equals destination");
}

Error Unreachable(const TopologySnapshot& snap, NodeIndex src, NodeIndex dst) {
  return Error(ErrorCode::kUnreachable,
               fmt::format("unreachable: no path from {} to {}",
                           NodeLabel(snap.node(src)), NodeLabel(snap.node(dst))));
}

struct PathOrder {
  bool operator()(const Path& x, const Path& y) const {
    if (x.total_delay_ms != y.total_delay_ms) {
      return x.total_delay_ms < y.total_delay_ms;
    }
    return x.nodes < y.nodes;
  }
};

}  // namespace

Path ShortestPath(const TopologySnapshot& snap, NodeIndex src, NodeIndex dst) {
  CheckEndpoints(snap, src, dst);
  ReverseSearch search(snap);
  std::vector<NodeIndex> nodes = search.Find(src, dst);
  if (nodes.empty()) throw Unreachable(snap, src, dst);
  return MakePath(snap, nodes);
}

std::vector<Path> KShortestPaths(const TopologySnapshot& snap, NodeIndex src,
                                 NodeIndex dst, int k) {
  return KShortestPaths(snap, src, dst, k, {});
}

std::vector<Path> KShortestPaths(const TopologySnapshot& snap, NodeIndex src,
                                 NodeIndex dst, int k,
                                 std::span<const char> excluded) {
  CheckEndpoints(snap, src, dst);
  if (k < 1) throw InvalidArgument(fmt::format("K must be >= 1, got {}", k));
  if (!excluded.empty() && excluded.size() != snap.directed_link_count()) {
    throw InvalidArgument("exclusion mask must cover every directed link");
  }

  ReverseSearch search(snap);
  search.ExcludeDirected(excluded);
  std::vector<Path> accepted;
  {
    std::vector<NodeIndex> first = search.Find(src, dst);
    if (first.empty()) throw Unreachable(snap, src, dst);
    accepted.push_back(MakePath(snap, first));
  }
  std::set<Path, PathOrder> candidates;
  std::set<std::vector<NodeIndex>> known{accepted.front().nodes};

  // Keeps going past k while the next candidate ties the k-th delay, so the
  // final sort by (delay, node sequence) sees every tied path.
  while (k > 1) {
    const Path prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeIndex spur = prev.nodes[i];
      for (const Path& p : accepted) {
        if (p.nodes.size() > i + 1 &&
            std::equal(p.nodes.begin(), p.nodes.begin() + i + 1,
                       prev.nodes.begin())) {
          search.BlockLink(p.links[i]);
        }
      }
      for (std::size_t j = 0; j < i; ++j) search.BlockNode(prev.nodes[j]);

      std::vector<NodeIndex> tail = search.Find(spur, dst);
      search.ClearBlocks();
      if (tail.empty()) continue;

      std::vector<NodeIndex> nodes(prev.nodes.begin(), prev.nodes.begin() + i);
      nodes.insert(nodes.end(), tail.begin(), tail.end());
      if (known.insert(nodes).second) candidates.insert(MakePath(snap, nodes));
    }
    if (candidates.empty()) break;
    if (static_cast<int>(accepted.size()) >= k &&
        candidates.begin()->total_delay_ms != accepted[k - 1].total_delay_ms) {
      break;
    }
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  std::stable_sort(accepted.begin(), accepted.end(), PathOrder{});
  if (static_cast<int>(accepted.size()) > k) accepted.resize(k);
  return accepted;
}

std::vector<Path> EquivalentPaths(std::span<const Path> paths, double epsilon) {
  if (epsilon < 0) {
    throw InvalidArgument(fmt::format("epsilon must be >= 0, got {}", epsilon));
  }
  std::vector<Path> out;
  if (paths.empty()) return out;
  double best = paths.front().total_delay_ms;
  for (const Path& p : paths) best = std::min(best, p.total_delay_ms);
  const double limit = (1.0 + epsilon) * best;
  for (const Path& p : paths) {
    if (p.total_delay_ms <= limit) out.push_back(p);
  }
  return out;
}

void PathCache::Prefetch(std::span<const std::pair<NodeIndex, NodeIndex>> pairs,
                         int threads) {
  std::vector<std::pair<NodeIndex, NodeIndex>> todo;
  {
    std::lock_guard lock(mu_);
    for (const auto& pr : pairs) {
      if (pr.first != pr.second && !cache_.contains(pr) &&
          std::find(todo.begin(), todo.end(), pr) == todo.end()) {
        todo.push_back(pr);
      }
    }
  }
  std::vector<std::vector<Path>> results(todo.size());
  std::vector<std::exception_ptr> failures(todo.size());
  internal::ParallelFor(todo.size(), threads, [&](std::size_t i) {
    try {
      results[i] = KShortestPaths(snap_, todo[i].first, todo[i].second, depth_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnreachable) failures[i] = std::current_exception();
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < todo.size(); ++i) {
    cache_.emplace(todo[i], std::move(results[i]));
  }
}

const std::vector<Path>& PathCache::Lookup(NodeIndex src, NodeIndex dst) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find({src, dst});
    if (it != cache_.end()) return it->second;
  }
  std::vector<Path> paths;
  try {
    paths = KShortestPaths(snap_, src, dst, depth_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnreachable) throw;
  }
  std::lock_guard lock(mu_);
  return cache_.emplace(std::make_pair(src, dst), std::move(paths)).first->second;
}

std::vector<Path> PathCache::Get(NodeIndex src, NodeIndex dst, int k) {
  const std::vector<Path>& all = Lookup(src, dst);
  const std::size_t n = std::min<std::size_t>(all.size(), std::max(k, 0));
  return {all.begin(), all.begin() + n};
}

}  // namespace leosim

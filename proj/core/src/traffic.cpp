#include "leosim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "leosim/error.hpp"

namespace leosim {

void City::Validate() const {
  if (!(weight > 0)) {
    throw InvalidArgument(fmt::format("city '{}' weight must be > 0, got {}", name, weight));
  }
  if (std::abs(lat_deg) > 90 || std::abs(lon_deg) > 180) {
    throw InvalidArgument(fmt::format("city '{}' has invalid coordinates ({}, {})",
                                      name, lat_deg, lon_deg));
  }
}

GroundStation City::AsStation(double min_elevation_deg) const {
  return {name, lat_deg, lon_deg, min_elevation_deg};
}

PairPolicy ParsePairPolicy(const std::string& name) {
  if (name == "all") return PairPolicy::kAll;
  if (name == "inter_region") return PairPolicy::kInterRegion;
  if (name == "inter_region_ring") return PairPolicy::kInterRegionRing;
  throw InvalidArgument(fmt::format(
      "unknown pair policy '{}' (expected all, inter_region, inter_region_ring)", name));
}

std::string PairPolicyName(PairPolicy policy) {
  switch (policy) {
    case PairPolicy::kAll: return "all";
    case PairPolicy::kInterRegion: return "inter_region";
    case PairPolicy::kInterRegionRing: return "inter_region_ring";
  }
  return "all";
}

std::vector<std::pair<int, int>> SelectPairs(std::span<const City> cities,
                                             const PairSelection& selection) {
  const int n = static_cast<int>(cities.size());
  std::vector<std::pair<int, int>> pairs;
  if (selection.policy == PairPolicy::kInterRegionRing) {
    if (selection.partners < 1) {
      throw InvalidArgument(fmt::format("traffic.partners must be >= 1, got {}",
                                        selection.partners));
    }
    // Members of each region in file order, regions in first-seen order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> members;
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) {
      auto& m = members[cities[i].region];
      if (m.empty()) order.push_back(cities[i].region);
      rank[i] = static_cast<int>(m.size());
      m.push_back(i);
    }
    for (int i = 0; i < n; ++i) {
      std::vector<int> partners;
      for (const std::string& region : order) {
        if (region == cities[i].region) continue;
        const auto& m = members[region];
        const int count = std::min<int>(selection.partners, m.size());
        for (int d = 0; d < count; ++d) {
          partners.push_back(m[(rank[i] + d) % m.size()]);
        }
      }
      std::sort(partners.begin(), partners.end());
      for (int j : partners) pairs.emplace_back(i, j);
    }
    return pairs;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (selection.policy == PairPolicy::kInterRegion &&
          cities[i].region == cities[j].region) {
        continue;
      }
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<FlowDemand> GravityDemands(std::span<const City> cities,
                                       double total_rate,
                                       const PairSelection& selection) {
  if (cities.size() < 2) {
    throw InvalidArgument("gravity model needs at least two cities");
  }
  if (!(total_rate > 0)) {
    throw InvalidArgument(fmt::format("total_rate must be > 0, got {}", total_rate));
  }
  for (const City& c : cities) c.Validate();
  const auto pairs = SelectPairs(cities, selection);
  if (pairs.empty()) throw InvalidArgument("pair policy selected no city pairs");

  double mass = 0;
  for (auto [i, j] : pairs) mass += cities[i].weight * cities[j].weight;
  std::vector<FlowDemand> out;
  out.reserve(pairs.size());
  for (auto [i, j] : pairs) {
    FlowDemand d;
    d.id = out.size();
    d.src = i;
    d.dst = j;
    d.offered_rate = total_rate * (cities[i].weight * cities[j].weight) / mass;
    out.push_back(d);
  }
  return out;
}

std::vector<double> ProgressiveFill(std::span<const std::vector<DirectedLinkId>> flow_links,
                                    std::span<const double> offered,
                                    std::span<const double> capacity) {
  const std::size_t n = flow_links.size();
  if (offered.size() != n) throw InvalidArgument("offered size mismatch");
  std::vector<double> rate(n, 0.0);
  std::vector<double> residual(capacity.begin(), capacity.end());
  std::vector<char> frozen(n, 0);
  for (std::size_t f = 0; f < n; ++f) {
    for (DirectedLinkId id : flow_links[f]) {
      if (id >= residual.size()) throw InvalidArgument("flow crosses unknown link");
    }
    if (!(offered[f] > 0)) {
      frozen[f] = 1;
    } else if (flow_links[f].empty()) {
      rate[f] = offered[f];
      frozen[f] = 1;
    }
  }
  std::vector<int> users(residual.size(), 0);
  while (true) {
    std::fill(users.begin(), users.end(), 0);
    double delta = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t f = 0; f < n; ++f) {
      if (frozen[f]) continue;
      any = true;
      delta = std::min(delta, offered[f] - rate[f]);
      for (DirectedLinkId id : flow_links[f]) ++users[id];
    }
    if (!any) break;
    for (std::size_t id = 0; id < users.size(); ++id) {
      if (users[id] > 0) delta = std::min(delta, residual[id] / users[id]);
    }
    std::vector<char> saturated(residual.size(), 0);
    for (std::size_t id = 0; id < users.size(); ++id) {
      if (users[id] == 0) continue;
      residual[id] -= users[id] * delta;
      if (residual[id] <= 1e-12 * capacity[id]) {
        residual[id] = 0;
        saturated[id] = 1;
      }
    }
    for (std::size_t f = 0; f < n; ++f) {
      if (frozen[f]) continue;
      rate[f] += delta;
      if (rate[f] >= offered[f] * (1 - 1e-12)) {
        rate[f] = std::min(rate[f], offered[f]);
        frozen[f] = 1;
        continue;
      }
      for (DirectedLinkId id : flow_links[f]) {
        if (saturated[id]) {
          frozen[f] = 1;
          break;
        }
      }
    }
  }
  return rate;
}

ThroughputReport MaxMinFairThroughput(const FlowAssignment& assignment,
                                      const TopologySnapshot& snap) {
  ThroughputReport report;
  report.algorithm = assignment.algorithm;
  report.time_s = snap.time_s();

  std::vector<std::vector<DirectedLinkId>> links;
  std::vector<double> offered;
  std::vector<std::size_t> index;  // report row of each routed flow
  for (const AssignedFlow& f : assignment.flows) {
    FlowThroughput row;
    row.flow_id = f.demand.id;
    row.src = f.demand.src;
    row.dst = f.demand.dst;
    row.offered = f.demand.offered_rate;
    row.routed = f.routed;
    row.reason = f.reason;
    if (f.routed) {
      index.push_back(report.flows.size());
      links.push_back(DirectedLinks(snap, f.path));
      offered.push_back(f.demand.offered_rate);
    }
    report.flows.push_back(std::move(row));
  }

  const std::vector<double> capacity = [&] {
    std::vector<double> c(snap.directed_link_count());
    for (DirectedLinkId id = 0; id < c.size(); ++id) c[id] = snap.Capacity(id);
    return c;
  }();
  const std::vector<double> rates = ProgressiveFill(links, offered, capacity);

  std::vector<double> realized_load(capacity.size(), 0.0);
  std::vector<double> offered_load(capacity.size(), 0.0);
  for (std::size_t k = 0; k < rates.size(); ++k) {
    report.flows[index[k]].realized = rates[k];
    for (DirectedLinkId id : links[k]) {
      realized_load[id] += rates[k];
      offered_load[id] += offered[k];
    }
  }
  report.link_utilization.resize(capacity.size());
  for (std::size_t id = 0; id < capacity.size(); ++id) {
    report.link_utilization[id] = realized_load[id] / capacity[id];
    report.max_realized_utilization =
        std::max(report.max_realized_utilization, report.link_utilization[id]);
    report.max_offered_utilization =
        std::max(report.max_offered_utilization, offered_load[id] / capacity[id]);
  }
  return report;
}

}  // namespace leosim

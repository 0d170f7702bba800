#pragma once

#include <span>
#include <string>
#include <vector>

#include "leosim/flow.hpp"
#include "leosim/topology.hpp"

namespace leosim {

struct City {
  std::string name;
  double lat_deg = 0;
  double lon_deg = 0;
  double weight = 1;   // traffic mass
  std::string region;  // optional grouping, used by region-aware pair policies

  void Validate() const;
  GroundStation AsStation(double min_elevation_deg) const;
};

enum class PairPolicy {
  kAll,              // every ordered pair i != j
  kInterRegion,      // ordered pairs whose regions differ
  kInterRegionRing,  // city of rank r in its region talks to ranks r .. r+partners-1
                     // of every other region
};

struct PairSelection {
  PairPolicy policy = PairPolicy::kAll;
  int partners = 1;  // used by kInterRegionRing
};

PairPolicy ParsePairPolicy(const std::string& name);
std::string PairPolicyName(PairPolicy policy);

// Ordered pairs selected by `selection` over `cities`, i.e. the demand
// matrix support.
std::vector<std::pair<int, int>> SelectPairs(std::span<const City> cities,
                                             const PairSelection& selection);

// demand(i, j) proportional to weight_i * weight_j over the selected pairs,
// normalized to sum to total_rate. Ids follow pair order.
std::vector<FlowDemand> GravityDemands(std::span<const City> cities,
                                       double total_rate,
                                       const PairSelection& selection = {});

// Max-min fair rates by progressive filling. flow_links[f] lists the
// resources flow f crosses; a flow never exceeds offered[f].
std::vector<double> ProgressiveFill(std::span<const std::vector<DirectedLinkId>> flow_links,
                                    std::span<const double> offered,
                                    std::span<const double> capacity);

struct FlowThroughput {
  std::size_t flow_id = 0;
  int src = 0;
  int dst = 0;
  double offered = 0;
  double realized = 0;
  bool routed = false;
  std::string reason;
};

struct ThroughputReport {
  std::string algorithm;
  double time_s = 0;
  std::vector<FlowThroughput> flows;   // assignment order
  std::vector<double> link_utilization;  // realized, per directed link
  double max_offered_utilization = 0;
  double max_realized_utilization = 0;
};

ThroughputReport MaxMinFairThroughput(const FlowAssignment& assignment,
                                      const TopologySnapshot& snap);

}  // namespace leosim

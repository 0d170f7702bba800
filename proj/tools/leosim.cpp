// leosim command-line front end.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leosim/error.hpp"
#include "leosim/io.hpp"
#include "leosim/pipeline.hpp"
#include "leosim/scenario.hpp"

namespace {

constexpr const char* kKeyReference = R"(
Config keys (YAML; any key can also be given as --set dotted.key=value):
  name                          run label
  seed                          64-bit seed for every random choice (default 1)
  threads                       worker threads, 0 = all cores (default 0)
  constellation.preset          iridium | globalstar | oneweb | starlink_sim |
                                kuiper | telesat (default starlink_sim)
  constellation.name            label for an inline constellation
  constellation.shells          inline list of {altitude_km, inclination_deg,
                                num_planes, sats_per_plane, phasing_factor,
                                raan_spread_deg}; replaces the preset
  grid.isl_enabled              build the +Grid ISL mesh (default true)
  grid.seam_links               link the first and last plane (default true)
  grid.polar_cutoff_deg         drop inter-plane links above this |lat| (default 70)
  capacity.profile              default | laser
  capacity.isl                  ISL capacity per direction (default 400)
  capacity.gsl                  ground link capacity per direction (default 400)
  stations.file                 city list: name,lat,lon,weight[,region] (required)
  stations.min_elevation_deg    elevation mask in degrees (default 25)
  traffic.total_rate            sum of offered demand (default 1000)
  traffic.pair_policy           all | inter_region | inter_region_ring
  traffic.partners              partners per region for inter_region_ring (default 1)
  traffic.demands_file          src,dst,offered_rate file; replaces the gravity model
  time.t                        snapshot time in seconds (default 0)
  time.series.end               last snapshot time for a series
  time.series.step              spacing of a series in seconds (default 15)
  scheduler                     ospf | elb | b4 | mfss (for simulate; default mfss)
  mfss.theta                    congestion threshold, in (0, 1) (default 0.7)
  mfss.alpha                    EWMA weight, in (0, 1] (default 0.5)
  mfss.epsilon                  equivalent-path delay tolerance, >= 0 (default 0.2)
  mfss.k                        candidate path search width, >= 1 (default 50)
  mfss.deactivate_when_clear    leave the auxiliary plane once all EWMAs < theta/2
                                (default true)
  mfss.detour_search            search around flagged and overflowing links when
                                no clean equivalent path fits (default true)
  elb.busy_threshold            utilization that marks a link busy, in (0, 1] (default 0.7)
  elb.deflection_fraction       share of flows deflected at a busy link (default 0.5)
  elb.ttl                       hop limit for deflected flows (default 32)
  b4.k                          candidate paths per demand (default 4)
  profile.k                     paths per pair for the delay profile (default 30)
  profile.pairs                 list of [src, dst] city names
  report.low_threshold          low throughput mark (default 125)
  report.high_threshold         high throughput mark (default 200)
  output.dir                    output directory (default out)

Flags override --set values, which override the config file.
)";

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> scheduler;
  std::optional<double> t;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "scenario YAML file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "override a config key, dotted.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "same as seed");
  cmd->add_option("--threads", c.threads, "same as threads");
  cmd->add_option("-o,--out", c.out, "same as output.dir");
  cmd->add_option("--scheduler", c.scheduler, "same as scheduler");
  cmd->add_option("--t", c.t, "same as time.t");
}

leosim::ScenarioConfig Load(const Common& c) {
  std::vector<std::string> overrides = c.sets;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  if (c.threads) overrides.push_back("threads=" + std::to_string(*c.threads));
  if (c.out) overrides.push_back("output.dir=" + *c.out);
  if (c.scheduler) overrides.push_back("scheduler=" + *c.scheduler);
  if (c.t) {
    std::ostringstream t;
    t.precision(17);
    t << *c.t;
    overrides.push_back("time.t=" + t.str());
  }
  return leosim::LoadScenario(c.config, overrides);
}

void PrintTable(const leosim::ComparisonTable& table) {
  const std::string high = ">" + leosim::FormatNumber(table.high_threshold);
  const std::string low = "<" + leosim::FormatNumber(table.low_threshold);
  std::printf("%-6s %6s %10s %10s %8s %9s\n", "algo", "flows", high.c_str(), low.c_str(),
              "median", "max_util");
  for (const auto& r : table.rows) {
    if (!r.error.empty()) {
      std::printf("%-6s failed: %s\n", r.algorithm.c_str(), r.error.c_str());
      continue;
    }
    std::printf("%-6s %6zu %10.3f %10.3f %8.1f %9.2f\n", r.algorithm.c_str(), r.flows,
                r.fraction_above_high, r.fraction_below_low, r.median_rate,
                r.max_link_utilization);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO constellation routing and flow-scheduling simulator", "leosim"};
  app.footer(kKeyReference);
  app.require_subcommand(1);

  Common common;
  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"generate", "write satellite elements and positions (constellation.jsonl)"},
      {"snapshot", "write the topology graph (snapshot.jsonl)"},
      {"profile", "write K-shortest-path delay profiles (delay_profiles.csv)"},
      {"simulate", "run one scheduler (assignment, CDF and summary)"},
      {"compare", "run all four schedulers (CDFs, comparison.csv/.jsonl)"},
  };
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->footer(kKeyReference);
    AddCommon(sub, common);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "leosim: error: %s\n", e.what());
    return 1;
  }

  try {
    const leosim::ScenarioConfig config = Load(common);
    const std::filesystem::path out = config.output_dir;
    leosim::FileList files;
    if (subs[0]->parsed()) {
      files = leosim::RunGenerate(config, out);
    } else if (subs[1]->parsed()) {
      files = leosim::RunSnapshot(config, out);
    } else if (subs[2]->parsed()) {
      files = leosim::RunProfile(config, out);
    } else if (subs[3]->parsed()) {
      files = leosim::RunSimulate(config, out);
    } else {
      leosim::ComparisonResult result;
      files = leosim::RunCompare(config, out, &result);
      PrintTable(result.table);
    }
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  } catch (const leosim::Error& e) {
    std::fprintf(stderr, "leosim: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "leosim: error: %s\n", e.what());
    return 1;
  }
  return 0;
}

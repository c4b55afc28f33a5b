#include <CLI11.hpp>
#include <iostream>

#include "crlab/error.hpp"
#include "crlab/tools/commands.hpp"

namespace crlab::tools {
namespace {

void add_common(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--config", o.config_path, "YAML scenario file")->check(CLI::ExistingFile);
  cmd.add_option("--seeds", o.seeds, "number of seeds, run as 1..N")->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out_dir, "output directory");
}

void add_sweep(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--sweep", o.sweep, "parameter to sweep");
  cmd.add_option_function<double>("--from", [&o](double v) { o.from = v; o.has_from = true; }, "first grid value");
  cmd.add_option_function<double>("--to", [&o](double v) { o.to = v; o.has_to = true; }, "last grid value");
  cmd.add_option_function<double>("--step", [&o](double v) { o.step = v; o.has_step = true; }, "grid step");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Cognitive radio relay and video streaming studies"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  RunOptions relay;
  relay.command = "relay";
  auto* relay_cmd = app.add_subcommand("relay", "throughput of DF, AF and DL relaying");
  add_common(*relay_cmd, relay);
  add_sweep(*relay_cmd, relay);

  RunOptions ia;
  ia.command = "ia";
  auto* ia_cmd = app.add_subcommand("ia", "interference-aligned video streaming");
  add_common(*ia_cmd, ia);
  add_sweep(*ia_cmd, ia);
  ia_cmd->add_option("--scenario", ia.scenario, "single-channel, multi-nobond or multi-bond");
  ia_cmd->add_flag("--ratio-table", ia.ratio_table, "tabulate the expected competitive ratio");
  ia_cmd->add_option("--M", ia.ratio_channels, "channel count for --ratio-table");
  ia_cmd->add_option("--eta-grid", ia.eta_grid, "from:to:step for --ratio-table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto files = relay_cmd->parsed() ? run_relay(relay) : run_ia(ia);
    for (const auto& f : files) std::cout << f.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace crlab::tools

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace dg = drone_gossip::cli;

int main(int argc, char** argv) {
  CLI::App app{"drone_gossip: version-age simulator and phase-type analytics"};
  app.require_subcommand(1);

  dg::CommandOptions opts;
  std::string config;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment JSON file")->required();
    sub->add_option("--seed", opts.seed, "Override base.seed");
    sub->add_option("--output", opts.output, "Override output_path");
    sub->add_option("--tolerance-renewal-mean", opts.tolerance_renewal_mean,
                    "Relative tolerance on the renewal mean");
    sub->add_option("--tolerance-renewal-var", opts.tolerance_renewal_var,
                    "Relative tolerance on the renewal variance");
    sub->add_flag("--quiet", opts.quiet, "Suppress stdout reports");
  };

  auto* simulate = app.add_subcommand("simulate", "Run the engine once and write a summary");
  auto* analyze = app.add_subcommand("analyze", "Phase-type analytics as JSON");
  auto* compare = app.add_subcommand("compare", "Simulation against analytics, pass/fail CSV");
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep with a trend verdict");
  for (auto* sub : {simulate, analyze, compare, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dg::kExitInvalidConfig;
  }
  opts.config_path = config;

  if (simulate->parsed()) return dg::cmd_simulate(opts, std::cout, std::cerr);
  if (analyze->parsed()) return dg::cmd_analyze(opts, std::cout, std::cerr);
  if (compare->parsed()) return dg::cmd_compare(opts, std::cout, std::cerr);
  return dg::cmd_sweep(opts, std::cout, std::cerr);
}

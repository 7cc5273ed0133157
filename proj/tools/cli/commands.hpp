#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/experiment.hpp"

namespace drone_gossip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitIoFailure = 2;
inline constexpr int kExitCompareFailed = 3;

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<double> tolerance_renewal_mean;
  std::optional<double> tolerance_renewal_var;
  bool quiet = false;
};

/// Output files, relative to output_path:
///   simulate: simulate_cells.csv, simulate_nodes.csv, simulate.json
///   analyze:  analyze.json (also printed to stdout unless quiet)
///   compare:  compare.csv
///   sweep:    sweep.csv
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);

inline constexpr std::string_view kCellsCsvHeader =
    "cell,min_cell_age,renewal_count,renewal_mean,renewal_var,return_count,return_mean,"
    "lag_count,lag_mean";
inline constexpr std::string_view kNodesCsvHeader = "node,cell,avg_age";
inline constexpr std::string_view kCompareCsvHeader =
    "quantity,analytical,simulated_mean,simulated_ci,num_samples,relative_error,tolerance,pass";
inline constexpr std::string_view kSweepCsvHeader =
    "param,value,replication,seed,avg_node_age_mean,avg_node_age_ci,renewal_mean,renewal_var,"
    "min_cell_age,dissemination_lag,regime_predicted_scale";

}  // namespace drone_gossip::cli

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drone_gossip/config.hpp"
#include "drone_gossip/metrics.hpp"

namespace drone_gossip::cli {

enum class SweepParameter { N, F, LambdaD, LambdaM, LambdaGossip };

std::string_view to_string(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::N;
  std::vector<double> values;
  /// Only for n sweeps: field -> exponent, the field becomes n^exponent
  /// (f is rounded to the nearest divisor of n). Keys: f, lambda_m,
  /// lambda_d, lambda_gossip.
  std::map<std::string, double> coupled;
};

struct Tolerances {
  double renewal_mean = 0.02;
  double renewal_var = 0.05;
  double drone_age_tv = 0.01;
  TrendBand trend{};
};

struct ExperimentConfig {
  NetworkConfig base;
  std::optional<SweepSpec> sweep;
  std::size_t replications = 1;
  std::string output_path = "drone_gossip_out";
  Tolerances tolerances;
};

/// Parses the JSON experiment schema. Unknown fields are rejected; every
/// error is a ConfigError naming the offending field or constraint.
ExperimentConfig parse_experiment(std::string_view json_text);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// The base config with one sweep value applied (couplings included), validated.
NetworkConfig apply_sweep_value(const NetworkConfig& base, const SweepSpec& sweep, double value);

}  // namespace drone_gossip::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "drone_gossip/ctmc.hpp"

namespace drone_gossip {

/// A configuration value violated a named constraint.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string constraint, const std::string& message)
      : std::invalid_argument(constraint + ": " + message), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

/// System sizes and rates. Rates are in events per unit time.
///
/// Nodes are numbered so that cell c holds nodes [c*n/f, (c+1)*n/f).
struct NetworkConfig {
  std::size_t n = 1;
  std::size_t f = 1;
  double lambda_e = 1.0;       // source self-update rate
  double lambda_s = 1.0;       // source -> drone
  double lambda_gossip = 0.0;  // per-node total push rate
  double lambda_d = 1.0;       // drone -> cell, split evenly over the cell's nodes
  MobilitySpec mobility{};
  double horizon = 1000.0;
  double burn_in_fraction = 0.2;
  std::uint64_t seed = 0;

  std::size_t cell_size() const { return n / f; }
  double move_rate() const { return mobility.move_rate; }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// Largest horizon representable by the engine's fixed-point clock.
inline constexpr double kMaxHorizon = 1073741824.0;  // 2^30

}  // namespace drone_gossip

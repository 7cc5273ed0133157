#include "drone_gossip/config.hpp"

#include <cmath>

namespace drone_gossip {

namespace {

void require_rate(const char* name, double v, bool allow_zero) {
  if (!std::isfinite(v)) throw ConfigError(name, "must be finite");
  if (allow_zero ? v < 0.0 : !(v > 0.0))
    throw ConfigError(name, allow_zero ? "must be nonnegative" : "must be positive");
}

}  // namespace

void NetworkConfig::validate() const {
  if (n < 1) throw ConfigError("n", "must be at least 1");
  if (f < 1) throw ConfigError("f", "must be at least 1");
  if (n % f != 0)
    throw ConfigError("f_divides_n", "f must divide n (n=" + std::to_string(n) +
                                         ", f=" + std::to_string(f) + ")");
  require_rate("lambda_e", lambda_e, true);
  require_rate("lambda_s", lambda_s, false);
  require_rate("lambda_gossip", lambda_gossip, true);
  require_rate("lambda_d", lambda_d, false);
  if (mobility.num_cells != f)
    throw ConfigError("mobility.num_cells",
                      "must equal f (num_cells=" + std::to_string(mobility.num_cells) +
                          ", f=" + std::to_string(f) + ")");
  try {
    mobility.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mobility", e.what());
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("horizon", "must be positive and finite");
  if (horizon > kMaxHorizon) throw ConfigError("horizon", "must not exceed 2^30");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw ConfigError("burn_in_fraction", "must lie in [0, 1)");
}

}  // namespace drone_gossip

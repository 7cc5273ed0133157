#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "drone_gossip/config.hpp"
#include "drone_gossip/pmf.hpp"

namespace drone_gossip {

enum class EventKind : std::uint8_t {
  SourceUpdate,
  SourceToDrone,
  DroneMove,
  DroneDisseminate,
  Gossip,
};
inline constexpr std::size_t kNumEventKinds = 5;

std::string_view to_string(EventKind kind);

/// Fixed-point simulation clock used for all time integrals: 2^-32 time
/// units per tick. Integrals of integer counters over tick spans are exact,
/// so accumulated sums do not depend on the order they were added in.
using Ticks = std::int64_t;
__extension__ typedef __int128 TickIntegral;
inline constexpr double kTicksPerUnit = 0x1.0p32;

inline Ticks to_ticks(double t) { return static_cast<Ticks>(t * kTicksPerUnit); }

/// Number of equal time slices the post-burn-in window is split into for
/// RunReport::mean_age_slices.
inline constexpr std::size_t kAgeSlices = 100;

/// Observable state between events. Version ages are source_version minus
/// the holder's version.
struct SimState {
  double now = 0.0;
  std::uint64_t source_version = 0;
  std::uint64_t drone_version = 0;
  std::size_t drone_cell = 0;
  std::vector<std::uint64_t> node_versions;
};

/// Output of one run. All time averages and samples cover the post-burn-in
/// window only (events strictly after burn_in_fraction * horizon).
struct RunReport {
  std::vector<double> per_node_avg_age;
  Pmf drone_age_histogram;  // time-weighted occupancy of each drone age
  std::vector<std::vector<double>> renewal_samples;      // per cell, gaps between deliveries
  std::vector<std::vector<double>> return_time_samples;  // per cell, drone exit-to-reentry gaps
  std::vector<std::vector<double>> dissemination_lag_samples;  // per cell
  std::vector<double> min_cell_age_avg;  // per cell, time-averaged min node age
  std::array<std::uint64_t, kNumEventKinds> event_counts{};  // whole run, indexed by EventKind
  std::vector<double> mean_age_slices;  // network-mean age per window slice
  double window_start = 0.0;
  double window_end = 0.0;
  std::uint64_t final_source_version = 0;

  double mean_node_age() const;
  std::uint64_t event_count(EventKind kind) const {
    return event_counts[static_cast<std::size_t>(kind)];
  }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Hook for test oracles and tracing. on_event fires after each event is
/// applied; on_finish fires with state.now == horizon.
class EventObserver {
 public:
  virtual ~EventObserver() = default;
  virtual void on_start(const NetworkConfig& /*cfg*/, const SimState& /*state*/) {}
  virtual void on_event(EventKind kind, const SimState& state) = 0;
  virtual void on_finish(const SimState& /*state*/) {}
};

class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulates the network as one Poisson stream of total rate
/// lambda_e + lambda_s + lambda_move + lambda_d + n * lambda_gossip, choosing each
/// event's kind in proportion to its rate. Deterministic in (cfg, cfg.seed).
/// Throws ConfigError for an invalid configuration.
RunReport run(const NetworkConfig& cfg, EventObserver* observer = nullptr);

struct RenewalSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; NaN for a single sample
  std::size_t count = 0;
};

struct LagSummary {
  double mean = 0.0;
  std::size_t count = 0;
};

RenewalSummary measure_renewals(const RunReport& report, std::size_t cell);
Pmf measure_drone_age(const RunReport& report);
LagSummary measure_dissemination_lag(const RunReport& report, std::size_t cell);

}  // namespace drone_gossip

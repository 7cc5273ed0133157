#include "drone_gossip/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "drone_gossip/ctmc.hpp"
#include "drone_gossip/rng.hpp"

namespace drone_gossip {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SourceUpdate: return "source_update";
    case EventKind::SourceToDrone: return "source_to_drone";
    case EventKind::DroneMove: return "drone_move";
    case EventKind::DroneDisseminate: return "drone_disseminate";
    case EventKind::Gossip: return "gossip";
  }
  return "unknown";
}

double RunReport::mean_node_age() const {
  if (per_node_avg_age.empty()) return 0.0;
  return std::accumulate(per_node_avg_age.begin(), per_node_avg_age.end(), 0.0) /
         static_cast<double>(per_node_avg_age.size());
}

namespace {

double to_double(TickIntegral num, Ticks den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// Samples the drone's next cell. Fully-connected and ring chains are drawn
// directly; custom chains are uniformized at `rate`, so a draw may leave the
// drone where it is.
class MobilitySampler {
 public:
  MobilitySampler(const MobilitySpec& spec, const GeneratorMatrix& gen)
      : kind_(spec.kind), cells_(gen.dim()), rate_(spec.move_rate) {
    if (kind_ == MobilityKind::Custom) {
      rate_ = std::max(spec.move_rate, gen.max_exit_rate());
      cdf_.assign(cells_ * cells_, 0.0);
      for (std::size_t i = 0; i < cells_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cells_; ++j) {
          if (j != i) acc += gen(i, j) / rate_;
          cdf_[i * cells_ + j] = acc;
        }
      }
    }
  }

  double rate() const { return rate_; }

  std::size_t next(std::size_t from, Rng& rng) const {
    if (cells_ == 1) return from;
    switch (kind_) {
      case MobilityKind::FullyConnected: {
        auto to = static_cast<std::size_t>(rng.below(cells_ - 1));
        return to >= from ? to + 1 : to;
      }
      case MobilityKind::Ring:
        if (cells_ == 2) return 1 - from;
        return rng.below(2) == 0 ? (from + 1) % cells_ : (from + cells_ - 1) % cells_;
      case MobilityKind::Custom: {
        const double u = rng.uniform();
        const double* row = cdf_.data() + from * cells_;
        const double* hit = std::upper_bound(row, row + cells_, u);
        return hit == row + cells_ ? from : static_cast<std::size_t>(hit - row);
      }
    }
    return from;
  }

 private:
  MobilityKind kind_;
  std::size_t cells_;
  double rate_;
  std::vector<double> cdf_;
};

struct LagTracker {
  bool active = false;
  std::uint64_t version = 0;
  double opened_at = 0.0;
  std::size_t informed = 0;
};

class Simulation {
 public:
  explicit Simulation(const NetworkConfig& cfg)
      : cfg_(cfg),
        gen_(build_generator(cfg.mobility)),
        mobility_(cfg.mobility, gen_),
        rng_(cfg.seed),
        cell_size_(cfg.cell_size()),
        burn_in_time_(cfg.burn_in_fraction * cfg.horizon),
        window_start_(to_ticks(burn_in_time_)),
        window_end_(to_ticks(cfg.horizon)) {
    const std::size_t n = cfg.n;
    const std::size_t f = cfg.f;
    state_.node_versions.assign(n, 0);

    node_integral_.assign(n, 0);
    node_last_.assign(n, 0);
    cell_max_.assign(f, 0);
    cell_integral_.assign(f, 0);
    cell_last_.assign(f, 0);
    last_renewal_.assign(f, -1.0);
    left_at_.assign(f, -1.0);
    trackers_.assign(f, LagTracker{});

    report_.renewal_samples.resize(f);
    report_.return_time_samples.resize(f);
    report_.dissemination_lag_samples.resize(f);

    rates_[0] = cfg.lambda_e;
    rates_[1] = cfg.lambda_s;
    rates_[2] = mobility_.rate();
    rates_[3] = cfg.lambda_d;
    rates_[4] = static_cast<double>(n) * cfg.lambda_gossip;
    double acc = 0.0;
    for (std::size_t k = 0; k < kNumEventKinds; ++k) {
      acc += rates_[k];
      cumulative_[k] = acc;
    }
    total_rate_ = acc;
    if (!(total_rate_ > 0.0)) throw ConfigError("total_rate", "all event rates are zero");
    if (window_end_ <= window_start_) throw ConfigError("horizon", "post-burn-in window is empty");
  }

  RunReport run(EventObserver* observer) {
    if (observer) observer->on_start(cfg_, state_);
    next_slice_ = 1;
    slice_boundary_ = slice_tick(1);
    slice_prev_boundary_ = window_start_;

    for (;;) {
      const double t = state_.now + rng_.exponential(total_rate_);
      if (t > cfg_.horizon) break;
      state_.now = t;
      const Ticks tk = to_ticks(t);
      while (next_slice_ <= kAgeSlices && slice_boundary_ <= tk) close_slice();

      const EventKind kind = draw_kind();
      ++report_.event_counts[static_cast<std::size_t>(kind)];
      apply(kind, tk);
      if (observer) observer->on_event(kind, state_);
    }

    state_.now = cfg_.horizon;
    while (next_slice_ <= kAgeSlices) close_slice();
    finalize();
    if (observer) observer->on_finish(state_);
    return std::move(report_);
  }

 private:
  Ticks slice_tick(std::size_t k) const {
    const TickIntegral width = window_end_ - window_start_;
    return window_start_ + static_cast<Ticks>(width * static_cast<TickIntegral>(k) /
                                              static_cast<TickIntegral>(kAgeSlices));
  }

  // Length of [from, to) that lies inside the metrics window.
  TickIntegral covered(Ticks from, Ticks to) const {
    const Ticks lo = std::max(from, window_start_);
    return to > lo ? static_cast<TickIntegral>(to - lo) : 0;
  }

  EventKind draw_kind() {
    const double u = rng_.uniform() * total_rate_;
    for (std::size_t k = 0; k + 1 < kNumEventKinds; ++k)
      if (u < cumulative_[k]) return static_cast<EventKind>(k);
    return EventKind::Gossip;
  }

  void flush_source(Ticks tk) {
    source_integral_ += static_cast<TickIntegral>(state_.source_version) * covered(source_last_, tk);
    source_last_ = tk;
  }

  void flush_node(std::size_t i, Ticks tk) {
    node_integral_[i] +=
        static_cast<TickIntegral>(state_.node_versions[i]) * covered(node_last_[i], tk);
    node_last_[i] = tk;
  }

  void flush_cell(std::size_t c, Ticks tk) {
    cell_integral_[c] += static_cast<TickIntegral>(cell_max_[c]) * covered(cell_last_[c], tk);
    cell_last_[c] = tk;
  }

  void flush_drone_age(Ticks tk) {
    const std::uint64_t age = state_.source_version - state_.drone_version;
    const TickIntegral span = covered(drone_age_last_, tk);
    if (span > 0) {
      if (drone_age_occupancy_.size() <= age) drone_age_occupancy_.resize(age + 1, 0);
      drone_age_occupancy_[age] += static_cast<Ticks>(span);
    }
    drone_age_last_ = tk;
  }

  void close_slice() {
    const Ticks b = slice_boundary_;
    flush_source(b);
    TickIntegral node_sum = 0;
    for (std::size_t i = 0; i < cfg_.n; ++i) {
      flush_node(i, b);
      node_sum += node_integral_[i];
    }
    const TickIntegral n = static_cast<TickIntegral>(cfg_.n);
    const TickIntegral age_sum =
        n * (source_integral_ - slice_source_prev_) - (node_sum - slice_node_prev_);
    const Ticks width = b - slice_prev_boundary_;
    report_.mean_age_slices.push_back(width > 0 ? to_double(age_sum, width) / static_cast<double>(cfg_.n)
                                                : 0.0);
    slice_source_prev_ = source_integral_;
    slice_node_prev_ = node_sum;
    slice_prev_boundary_ = b;
    ++next_slice_;
    if (next_slice_ <= kAgeSlices) slice_boundary_ = slice_tick(next_slice_);
  }

  void set_node_version(std::size_t i, std::uint64_t v, Ticks tk) {
    assert(v <= state_.drone_version);
    flush_node(i, tk);
    const std::uint64_t old = state_.node_versions[i];
    state_.node_versions[i] = v;

    const std::size_t c = i / cell_size_;
    if (v > cell_max_[c]) {
      flush_cell(c, tk);
      cell_max_[c] = v;
    }
    LagTracker& tr = trackers_[c];
    if (tr.active && old < tr.version && v >= tr.version) {
      if (++tr.informed == cell_size_) {
        report_.dissemination_lag_samples[c].push_back(state_.now - tr.opened_at);
        tr.active = false;
      }
    }
  }

  void apply(EventKind kind, Ticks tk) {
    const bool in_window = state_.now > burn_in_time_;
    switch (kind) {
      case EventKind::SourceUpdate:
        flush_source(tk);
        flush_drone_age(tk);
        ++state_.source_version;
        break;

      case EventKind::SourceToDrone:
        flush_drone_age(tk);
        state_.drone_version = state_.source_version;
        break;

      case EventKind::DroneMove: {
        const std::size_t from = state_.drone_cell;
        const std::size_t to = mobility_.next(from, rng_);
        if (to == from) break;
        state_.drone_cell = to;
        if (in_window) {
          left_at_[from] = state_.now;
          if (left_at_[to] >= 0.0) report_.return_time_samples[to].push_back(state_.now - left_at_[to]);
        }
        break;
      }

      case EventKind::DroneDisseminate: {
        const std::size_t c = state_.drone_cell;
        const std::size_t node = c * cell_size_ + static_cast<std::size_t>(rng_.below(cell_size_));
        if (in_window) {
          if (last_renewal_[c] >= 0.0)
            report_.renewal_samples[c].push_back(state_.now - last_renewal_[c]);
          last_renewal_[c] = state_.now;
        }
        const std::uint64_t prev_cell_max = cell_max_[c];
        const std::uint64_t v = state_.drone_version;
        if (v > state_.node_versions[node]) set_node_version(node, v, tk);
        if (in_window && v > prev_cell_max && !trackers_[c].active) {
          // v is new to the cell, so the receiver is its only holder.
          if (cell_size_ == 1) {
            report_.dissemination_lag_samples[c].push_back(0.0);
          } else {
            trackers_[c] = LagTracker{true, v, state_.now, 1};
          }
        }
        break;
      }

      case EventKind::Gossip: {
        if (cell_size_ == 1) break;
        const auto sender = static_cast<std::size_t>(rng_.below(cfg_.n));
        const std::size_t base = sender - sender % cell_size_;
        std::size_t receiver = base + static_cast<std::size_t>(rng_.below(cell_size_ - 1));
        if (receiver >= sender) ++receiver;
        const std::uint64_t v = state_.node_versions[sender];
        if (v > state_.node_versions[receiver]) set_node_version(receiver, v, tk);
        break;
      }
    }
    assert(state_.drone_version <= state_.source_version);
  }

  void finalize() {
    const Ticks end = window_end_;
    flush_source(end);
    flush_drone_age(end);
    for (std::size_t i = 0; i < cfg_.n; ++i) flush_node(i, end);
    for (std::size_t c = 0; c < cfg_.f; ++c) flush_cell(c, end);

    const Ticks width = window_end_ - window_start_;
    report_.per_node_avg_age.resize(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i)
      report_.per_node_avg_age[i] = to_double(source_integral_ - node_integral_[i], width);
    report_.min_cell_age_avg.resize(cfg_.f);
    for (std::size_t c = 0; c < cfg_.f; ++c)
      report_.min_cell_age_avg[c] = to_double(source_integral_ - cell_integral_[c], width);
    for (std::size_t k = 0; k < drone_age_occupancy_.size(); ++k)
      if (drone_age_occupancy_[k] > 0)
        report_.drone_age_histogram[k] = to_double(drone_age_occupancy_[k], width);

    report_.window_start = burn_in_time_;
    report_.window_end = cfg_.horizon;
    report_.final_source_version = state_.source_version;
  }

  NetworkConfig cfg_;
  GeneratorMatrix gen_;
  MobilitySampler mobility_;
  Rng rng_;
  std::size_t cell_size_;
  double burn_in_time_;
  Ticks window_start_;
  Ticks window_end_;

  std::array<double, kNumEventKinds> rates_{};
  std::array<double, kNumEventKinds> cumulative_{};
  double total_rate_ = 0.0;

  SimState state_;
  RunReport report_;

  TickIntegral source_integral_ = 0;
  Ticks source_last_ = 0;
  std::vector<TickIntegral> node_integral_;
  std::vector<Ticks> node_last_;
  std::vector<std::uint64_t> cell_max_;
  std::vector<TickIntegral> cell_integral_;
  std::vector<Ticks> cell_last_;
  std::vector<Ticks> drone_age_occupancy_;
  Ticks drone_age_last_ = 0;

  std::vector<double> last_renewal_;
  std::vector<double> left_at_;
  std::vector<LagTracker> trackers_;

  std::size_t next_slice_ = 1;
  Ticks slice_boundary_ = 0;
  Ticks slice_prev_boundary_ = 0;
  TickIntegral slice_source_prev_ = 0;
  TickIntegral slice_node_prev_ = 0;
};

}  // namespace

RunReport run(const NetworkConfig& cfg, EventObserver* observer) {
  cfg.validate();
  Simulation sim(cfg);
  return sim.run(observer);
}

RenewalSummary measure_renewals(const RunReport& report, std::size_t cell) {
  if (cell >= report.renewal_samples.size()) throw std::out_of_range("measure_renewals: cell out of range");
  const auto& xs = report.renewal_samples[cell];
  if (xs.empty()) throw InsufficientSamplesError("measure_renewals: fewer than 2 renewals in cell");
  RenewalSummary s;
  s.count = xs.size();
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(s.count);
  if (s.count < 2) {
    s.variance = std::nan("");
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(s.count - 1);
  return s;
}

Pmf measure_drone_age(const RunReport& report) {
  if (report.drone_age_histogram.empty())
    throw InsufficientSamplesError("measure_drone_age: empty metrics window");
  return report.drone_age_histogram;
}

LagSummary measure_dissemination_lag(const RunReport& report, std::size_t cell) {
  if (cell >= report.dissemination_lag_samples.size())
    throw std::out_of_range("measure_dissemination_lag: cell out of range");
  const auto& xs = report.dissemination_lag_samples[cell];
  if (xs.empty()) throw InsufficientSamplesError("measure_dissemination_lag: no completed lag");
  return {std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()), xs.size()};
}

}  // namespace drone_gossip

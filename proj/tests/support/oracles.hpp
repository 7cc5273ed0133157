// Independent reference computations used only by tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "drone_gossip/engine.hpp"
#include "drone_gossip/matrix.hpp"
#include "drone_gossip/phasetype.hpp"
#include "drone_gossip/rng.hpp"

namespace drone_gossip::oracle {

/// Random irreducible generator: a random cycle guarantees strong
/// connectivity, then extra edges are sprinkled with probability `density`.
inline Matrix random_irreducible_generator(std::size_t dim, Rng& rng, double density = 0.3) {
  Matrix q(dim, dim, 0.0);
  if (dim == 1) return q;
  std::vector<std::size_t> order(dim);
  for (std::size_t i = 0; i < dim; ++i) order[i] = i;
  for (std::size_t i = dim - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  for (std::size_t k = 0; k < dim; ++k) q(order[k], order[(k + 1) % dim]) = 0.1 + 2.0 * rng.uniform();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (i != j && q(i, j) == 0.0 && rng.uniform() < density) q(i, j) = 0.1 + 2.0 * rng.uniform();
  for (std::size_t i = 0; i < dim; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
      if (j != i) s += q(i, j);
    q(i, i) = -s;
  }
  return q;
}

/// Stationary law by power iteration on the lazy uniformized chain
/// P = I + Q / (2 max exit rate).
inline std::vector<double> stationary_by_power_iteration(const Matrix& q, std::size_t iters = 200000,
                                                         double tol = 1e-14) {
  const std::size_t n = q.rows();
  double rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) rate = std::max(rate, -q(i, i));
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  if (rate == 0.0) return pi;
  const double h = 0.5 / rate;
  for (std::size_t it = 0; it < iters; ++it) {
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = pi[j];
      for (std::size_t i = 0; i < n; ++i) s += pi[i] * q(i, j) * h;
      next[j] = s;
    }
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < tol) break;
  }
  return pi;
}

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Simulates the killed chain directly: hold Exp(-M_ii), then jump to j with
/// probability M_ij / -M_ii or absorb with the row's deficit.
inline SampleMoments simulate_absorption(const PhaseTypeModel& model, Rng& rng, std::size_t samples) {
  const std::size_t n = model.subgen.rows();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (model.alpha[i] > 0.5) start = i;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t state = start;
    double t = 0.0;
    for (;;) {
      const double out = -model.subgen(state, state);
      t += rng.exponential(out);
      double u = rng.uniform() * out;
      std::size_t next = n;  // n = absorbed
      for (std::size_t j = 0; j < n; ++j) {
        if (j == state) continue;
        if (u < model.subgen(state, j)) {
          next = j;
          break;
        }
        u -= model.subgen(state, j);
      }
      if (next == n) break;
      state = next;
    }
    sum += t;
    sum2 += t * t;
  }
  const double m = sum / static_cast<double>(samples);
  return {m, (sum2 - static_cast<double>(samples) * m * m) / static_cast<double>(samples - 1)};
}

/// Expected time for push gossip to inform all m nodes of a complete graph
/// from one informed node: per-node push rate `rate`, plus a drone that
/// keeps delivering to uniform nodes at total rate `drone_rate`.
inline double push_spread_time(std::size_t m, double rate, double drone_rate = 0.0) {
  double t = 0.0;
  const double mm = static_cast<double>(m);
  for (std::size_t k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    t += 1.0 / (rate * kk * (mm - kk) / (mm - 1.0) + drone_rate * (mm - kk) / mm);
  }
  return t;
}

/// Re-integrates every node's age over every inter-event interval from the
/// full state vector. Uses the engine's tick clock, so results are exact.
class BruteForceAges : public EventObserver {
 public:
  void on_start(const NetworkConfig& cfg, const SimState& state) override {
    window_start_ = to_ticks(cfg.burn_in_fraction * cfg.horizon);
    window_end_ = to_ticks(cfg.horizon);
    integrals_.assign(cfg.n, 0);
    snapshot_ = state;
    last_ = 0;
  }

  void on_event(EventKind, const SimState& state) override {
    integrate_to(to_ticks(state.now));
    if (state.drone_version > state.source_version) ++violations;
    for (std::size_t i = 0; i < state.node_versions.size(); ++i) {
      if (state.node_versions[i] > state.drone_version) ++violations;
      if (state.node_versions[i] < snapshot_.node_versions[i]) ++violations;
    }
    if (state.drone_version < snapshot_.drone_version) ++violations;
    if (state.now < snapshot_.now) ++violations;
    snapshot_ = state;
  }

  void on_finish(const SimState&) override { integrate_to(window_end_); }

  std::vector<double> averages() const {
    std::vector<double> out(integrals_.size());
    const Ticks width = window_end_ - window_start_;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<double>(static_cast<long double>(integrals_[i]) /
                                   static_cast<long double>(width));
    return out;
  }

  std::size_t violations = 0;

 private:
  void integrate_to(Ticks tk) {
    const Ticks lo = std::max(last_, window_start_);
    const TickIntegral span = tk > lo ? tk - lo : 0;
    for (std::size_t i = 0; i < integrals_.size(); ++i) {
      const auto age = static_cast<TickIntegral>(snapshot_.source_version - snapshot_.node_versions[i]);
      integrals_[i] += age * span;
    }
    last_ = tk;
  }

  Ticks window_start_ = 0;
  Ticks window_end_ = 0;
  Ticks last_ = 0;
  SimState snapshot_;
  std::vector<TickIntegral> integrals_;
};

}  // namespace drone_gossip::oracle

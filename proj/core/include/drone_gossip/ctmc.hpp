#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "drone_gossip/matrix.hpp"

namespace drone_gossip {

enum class MobilityKind { FullyConnected, Ring, Custom };

std::string_view to_string(MobilityKind kind);
std::optional<MobilityKind> parse_mobility_kind(std::string_view name);

/// Topology and rates of the drone's cell-to-cell CTMC.
///
/// For FullyConnected every ordered pair of distinct cells carries rate
/// move_rate / (num_cells - 1). For Ring each cell sends move_rate / 2 to
/// each cyclic neighbour (move_rate to the other cell when num_cells == 2).
/// Custom takes custom_generator verbatim; its exit rates need not be equal.
struct MobilitySpec {
  MobilityKind kind = MobilityKind::FullyConnected;
  std::size_t num_cells = 1;
  double move_rate = 1.0;
  std::optional<Matrix> custom_generator;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// A validated CTMC generator: nonnegative off-diagonals, rows summing to 0.
class GeneratorMatrix {
 public:
  /// Validates with a row-sum tolerance of 1e-12 relative to the row's
  /// largest entry; throws std::invalid_argument otherwise.
  explicit GeneratorMatrix(Matrix entries);

  std::size_t dim() const { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Matrix& entries() const { return entries_; }

  double exit_rate(std::size_t state) const { return -entries_(state, state); }
  double max_exit_rate() const;

 private:
  Matrix entries_;
};

struct StationaryDistribution {
  std::vector<double> probs;
};

/// Raised for chains with more than one communicating class.
class ReducibleChainError : public std::runtime_error {
 public:
  explicit ReducibleChainError(std::vector<std::size_t> states);
  const std::vector<std::size_t>& states() const { return states_; }

 private:
  std::vector<std::size_t> states_;
};

GeneratorMatrix build_generator(const MobilitySpec& spec);

/// States that are not mutually reachable with state 0 in the positive-rate
/// digraph. Empty iff the chain is irreducible.
std::vector<std::size_t> unreachable_states(const GeneratorMatrix& gen);

/// Solves pi Q = 0, sum(pi) = 1 by dense elimination on Q^T with the
/// normalization replacing the last (redundant) balance equation.
/// Throws ReducibleChainError for reducible chains.
StationaryDistribution stationary_distribution(const GeneratorMatrix& gen);

/// Row `state` of the jump chain: Q[state][j] / exit_rate(state), zero on
/// the diagonal. Returns an empty vector for the single-state chain, where
/// moves are no-ops. Throws std::invalid_argument for an absorbing state of
/// a larger chain.
std::vector<double> embedded_jump_distribution(const GeneratorMatrix& gen, std::size_t state);

}  // namespace drone_gossip

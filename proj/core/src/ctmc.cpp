#include "drone_gossip/ctmc.hpp"

#include <cmath>
#include <string>

namespace drone_gossip {

namespace {

constexpr double kStructuralTol = 1e-12;

std::vector<bool> reach(const Matrix& q, std::size_t start, bool forward) {
  const std::size_t n = q.rows();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || seen[j]) continue;
      const double rate = forward ? q(i, j) : q(j, i);
      if (rate > 0.0) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(xs[i]);
  }
  return s;
}

}  // namespace

std::string_view to_string(MobilityKind kind) {
  switch (kind) {
    case MobilityKind::FullyConnected: return "fully_connected";
    case MobilityKind::Ring: return "ring";
    case MobilityKind::Custom: return "custom";
  }
  return "unknown";
}

std::optional<MobilityKind> parse_mobility_kind(std::string_view name) {
  if (name == "fully_connected") return MobilityKind::FullyConnected;
  if (name == "ring") return MobilityKind::Ring;
  if (name == "custom") return MobilityKind::Custom;
  return std::nullopt;
}

void MobilitySpec::validate() const {
  if (num_cells < 1) throw std::invalid_argument("num_cells: must be at least 1");
  if (!(move_rate > 0.0) || !std::isfinite(move_rate))
    throw std::invalid_argument("move_rate: must be positive and finite");
  if (kind == MobilityKind::Custom) {
    if (!custom_generator)
      throw std::invalid_argument("custom_generator: required when kind is custom");
    if (custom_generator->rows() != num_cells || custom_generator->cols() != num_cells)
      throw std::invalid_argument("custom_generator: must be num_cells x num_cells (num_cells=" +
                                  std::to_string(num_cells) + ")");
    GeneratorMatrix check(*custom_generator);
  } else if (custom_generator) {
    throw std::invalid_argument("custom_generator: only allowed when kind is custom");
  }
}

GeneratorMatrix::GeneratorMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (!entries_.square() || entries_.rows() == 0)
    throw std::invalid_argument("generator: must be a nonempty square matrix");
  const std::size_t n = entries_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v)) throw std::invalid_argument("generator: entries must be finite");
      if (i != j && v < 0.0)
        throw std::invalid_argument("generator: off-diagonal entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative");
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > kStructuralTol * scale)
      throw std::invalid_argument("generator: row " + std::to_string(i) + " does not sum to 0");
  }
}

double GeneratorMatrix::max_exit_rate() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) m = std::max(m, exit_rate(i));
  return m;
}

ReducibleChainError::ReducibleChainError(std::vector<std::size_t> states)
    : std::runtime_error("reducible chain: states {" + join(states) +
                         "} are not mutually reachable with state 0"),
      states_(std::move(states)) {}

GeneratorMatrix build_generator(const MobilitySpec& spec) {
  spec.validate();
  const std::size_t f = spec.num_cells;
  if (spec.kind == MobilityKind::Custom) return GeneratorMatrix(*spec.custom_generator);

  Matrix q(f, f, 0.0);
  if (f == 1) return GeneratorMatrix(std::move(q));

  if (spec.kind == MobilityKind::FullyConnected) {
    const double rate = spec.move_rate / static_cast<double>(f - 1);
    for (std::size_t i = 0; i < f; ++i)
      for (std::size_t j = 0; j < f; ++j) q(i, j) = (i == j) ? -spec.move_rate : rate;
  } else if (f == 2) {
    q = Matrix{{-spec.move_rate, spec.move_rate}, {spec.move_rate, -spec.move_rate}};
  } else {
    const double half = spec.move_rate / 2.0;
    for (std::size_t i = 0; i < f; ++i) {
      q(i, (i + 1) % f) = half;
      q(i, (i + f - 1) % f) = half;
      q(i, i) = -spec.move_rate;
    }
  }
  return GeneratorMatrix(std::move(q));
}

std::vector<std::size_t> unreachable_states(const GeneratorMatrix& gen) {
  const auto fwd = reach(gen.entries(), 0, true);
  const auto bwd = reach(gen.entries(), 0, false);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gen.dim(); ++i)
    if (!fwd[i] || !bwd[i]) out.push_back(i);
  return out;
}

StationaryDistribution stationary_distribution(const GeneratorMatrix& gen) {
  if (auto bad = unreachable_states(gen); !bad.empty()) throw ReducibleChainError(std::move(bad));

  const std::size_t n = gen.dim();
  if (n == 1) return {{1.0}};

  Matrix a = gen.entries().transposed();
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  rhs[n - 1] = 1.0;

  auto pi = solve(a, rhs);
  // Only rounding-level negatives can appear for an irreducible chain.
  double total = 0.0;
  for (double& p : pi) {
    if (p < 0.0) p = 0.0;
    total += p;
  }
  for (double& p : pi) p /= total;
  return {std::move(pi)};
}

std::vector<double> embedded_jump_distribution(const GeneratorMatrix& gen, std::size_t state) {
  if (state >= gen.dim()) throw std::out_of_range("embedded_jump_distribution: state out of range");
  if (gen.dim() == 1) return {};
  const double exit = gen.exit_rate(state);
  if (!(exit > 0.0))
    throw std::invalid_argument("embedded_jump_distribution: state " + std::to_string(state) +
                                " has zero exit rate");
  std::vector<double> p(gen.dim(), 0.0);
  for (std::size_t j = 0; j < gen.dim(); ++j)
    if (j != state) p[j] = gen(state, j) / exit;
  return p;
}

}  // namespace drone_gossip

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "drone_gossip/config.hpp"
#include "drone_gossip/ctmc.hpp"
#include "drone_gossip/matrix.hpp"

namespace drone_gossip {

/// Absorption-time law given by a starting vector over transient states and
/// the sub-generator restricted to them.
struct PhaseTypeModel {
  std::vector<double> alpha;
  Matrix subgen;
};

struct RenewalMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

/// Solutions of M x = -1 and M y = -x. For alpha = e_t the first two
/// moments of the absorption time are x_t and 2 y_t.
struct AbsorptionSolution {
  std::vector<double> x;
  std::vector<double> y;
};

enum class Regime { BandwidthConstrained, MobilityConstrained };
std::string_view to_string(Regime regime);

struct RegimeReport {
  Regime regime = Regime::BandwidthConstrained;
  double dominant_term = 0.0;  // f / min-rate of the bottleneck
  double gossip_term = 0.0;    // ln(n/f), or 0 when a cell has one node
  double predicted_age_scale = 0.0;
};

/// Kills the drone chain at rate dissemination_rate while it sits in
/// target_cell. The renewal restarts right after a delivery, so alpha is the
/// indicator of target_cell.
PhaseTypeModel build_subgenerator(const GeneratorMatrix& gen, double dissemination_rate,
                                  std::size_t target_cell);

/// Two linear solves against one LU factorization; M^-1 is never formed.
/// Throws SingularMatrixError when absorption is not certain.
AbsorptionSolution solve_absorption(const PhaseTypeModel& model);

RenewalMoments renewal_moments(const PhaseTypeModel& model);

/// Closed forms for fully-connected mobility with target cell 0:
///   E[tau]   = f / lambda_d
///   Var[tau] = f^2 / lambda_d^2 + 2 (f-1)^2 / (lambda_d lambda_m)
RenewalMoments fully_connected_moments(std::size_t f, double lambda_m, double lambda_d);

/// x_2 (= x_j for every non-target j) in the fully-connected solve.
double fully_connected_off_target_mean(std::size_t f, double lambda_m, double lambda_d);

/// min(1, 4/g^2 + 8 lambda_d / (lambda_m g^2)): Chebyshev bound on
/// P[|tau - E tau| > f g / (2 lambda_d)] under fully-connected mobility.
double chebyshev_tail_bound(std::size_t f, double lambda_m, double lambda_d, double g);

/// P[drone age = k]: geometric with success lambda_s / (lambda_e + lambda_s).
double drone_age_pmf(double lambda_e, double lambda_s, std::uint64_t k);

/// Finite-n reading of the two scaling regimes. Ties (lambda_m == lambda_d)
/// count as bandwidth-constrained.
RegimeReport classify_regime(const NetworkConfig& cfg);

}  // namespace drone_gossip

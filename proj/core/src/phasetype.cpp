#include "drone_gossip/phasetype.hpp"

#include <cmath>
#include <stdexcept>

namespace drone_gossip {

std::string_view to_string(Regime regime) {
  return regime == Regime::BandwidthConstrained ? "bandwidth_constrained"
                                                : "mobility_constrained";
}

PhaseTypeModel build_subgenerator(const GeneratorMatrix& gen, double dissemination_rate,
                                  std::size_t target_cell) {
  if (target_cell >= gen.dim()) throw std::out_of_range("build_subgenerator: target_cell out of range");
  if (!(dissemination_rate > 0.0) || !std::isfinite(dissemination_rate))
    throw std::invalid_argument("build_subgenerator: dissemination_rate must be positive");

  PhaseTypeModel model{std::vector<double>(gen.dim(), 0.0), gen.entries()};
  model.alpha[target_cell] = 1.0;
  model.subgen(target_cell, target_cell) -= dissemination_rate;
  return model;
}

AbsorptionSolution solve_absorption(const PhaseTypeModel& model) {
  const std::size_t n = model.subgen.rows();
  if (!model.subgen.square() || model.alpha.size() != n)
    throw std::invalid_argument("solve_absorption: alpha and sub-generator sizes disagree");

  const LuDecomposition lu(model.subgen);
  std::vector<double> rhs(n, -1.0);
  AbsorptionSolution sol;
  sol.x = lu.solve(rhs);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -sol.x[i];
  sol.y = lu.solve(rhs);
  return sol;
}

RenewalMoments renewal_moments(const PhaseTypeModel& model) {
  const auto sol = solve_absorption(model);
  double ax = 0.0;
  double ay = 0.0;
  for (std::size_t i = 0; i < model.alpha.size(); ++i) {
    ax += model.alpha[i] * sol.x[i];
    ay += model.alpha[i] * sol.y[i];
  }
  RenewalMoments m;
  m.mean = ax;
  m.second_moment = 2.0 * ay;
  m.variance = std::max(0.0, m.second_moment - ax * ax);
  return m;
}

RenewalMoments fully_connected_moments(std::size_t f, double lambda_m, double lambda_d) {
  if (f < 1) throw std::invalid_argument("fully_connected_moments: f must be at least 1");
  const double ff = static_cast<double>(f);
  const double fm1 = ff - 1.0;
  RenewalMoments m;
  m.mean = ff / lambda_d;
  const double y1 = ff * ff / (lambda_d * lambda_d) + fm1 * fm1 / (lambda_d * lambda_m);
  m.second_moment = 2.0 * y1;
  m.variance = ff * ff / (lambda_d * lambda_d) + 2.0 * fm1 * fm1 / (lambda_d * lambda_m);
  return m;
}

double fully_connected_off_target_mean(std::size_t f, double lambda_m, double lambda_d) {
  const double ff = static_cast<double>(f);
  return ff / lambda_d + (ff - 1.0) / lambda_m;
}

double chebyshev_tail_bound(std::size_t f, double lambda_m, double lambda_d, double g) {
  if (f < 1) throw std::invalid_argument("chebyshev_tail_bound: f must be at least 1");
  if (!(g > 0.0)) throw std::invalid_argument("chebyshev_tail_bound: g must be positive");
  const double g2 = g * g;
  return std::min(1.0, 4.0 / g2 + 8.0 * lambda_d / (lambda_m * g2));
}

double drone_age_pmf(double lambda_e, double lambda_s, std::uint64_t k) {
  if (!(lambda_s > 0.0) || lambda_e < 0.0)
    throw std::invalid_argument("drone_age_pmf: rates must be positive");
  const double total = lambda_e + lambda_s;
  return (lambda_s / total) * std::pow(lambda_e / total, static_cast<double>(k));
}

RegimeReport classify_regime(const NetworkConfig& cfg) {
  const double lm = cfg.move_rate();
  const double ld = cfg.lambda_d;
  if (!(lm > 0.0) || !(ld > 0.0) || cfg.n < 1 || cfg.f < 1)
    throw std::invalid_argument("classify_regime: rates and sizes must be positive");

  const double f = static_cast<double>(cfg.f);
  RegimeReport r;
  if (lm >= ld) {
    r.regime = Regime::BandwidthConstrained;
    r.dominant_term = f / ld;
  } else {
    r.regime = Regime::MobilityConstrained;
    r.dominant_term = f / lm;
  }
  const double per_cell = static_cast<double>(cfg.n) / f;
  r.gossip_term = per_cell >= 2.0 ? std::log(per_cell) : 0.0;
  r.predicted_age_scale = r.dominant_term + r.gossip_term;
  return r;
}

}  // namespace drone_gossip

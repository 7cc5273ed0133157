// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli/commands.hpp"
#include "drone_gossip/ctmc.hpp"
#include "drone_gossip/engine.hpp"
#include "drone_gossip/metrics.hpp"
#include "drone_gossip/phasetype.hpp"
#include "drone_gossip/rng.hpp"
#include "oracles.hpp"

using namespace drone_gossip;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kDroneAgeTv = 0.01;
constexpr double kRenewalMeanRel = 0.02;
constexpr double kLambdaMInvarianceRel = 0.02;
constexpr double kClosedFormRel = 1e-10;
constexpr double kRenewalVarRel = 0.05;
constexpr TrendBand kTrendBand{0.6, 1.67};
constexpr double kFlatAgeRel = 0.20;
constexpr double kHalvedMobilityLow = 1.5;
constexpr double kHalvedMobilityHigh = 2.5;
constexpr TrendBand kLagBand{0.8, 1.2};

// Sample sizes.
constexpr std::size_t kRenewalSamples = 200000;
constexpr std::size_t kVarianceSamples = 150000;
constexpr std::size_t kMinRenewalSamples = 100000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

NetworkConfig network(std::size_t n, std::size_t f, MobilityKind kind, double lm, double ld) {
  NetworkConfig cfg;
  cfg.n = n;
  cfg.f = f;
  cfg.lambda_d = ld;
  cfg.mobility.kind = kind;
  cfg.mobility.num_cells = f;
  cfg.mobility.move_rate = lm;
  return cfg;
}

/// Horizon that leaves `samples` renewals of mean `mean` after burn-in, with 5% slack.
double horizon_for(std::size_t samples, double mean, double burn_in) {
  return 1.05 * static_cast<double>(samples) * mean / (1.0 - burn_in);
}

Outcome drone_age_law() {
  NetworkConfig cfg = network(1, 1, MobilityKind::FullyConnected, 1.0, 1.0);
  cfg.lambda_e = 1.0;
  cfg.lambda_s = 1.0;
  cfg.horizon = 1e5;
  cfg.seed = 101;
  const RunReport r = run(cfg);
  const Pmf sim = measure_drone_age(r);
  Pmf exact;
  for (std::uint64_t k = 0; k < 64; ++k) exact[k] = std::ldexp(1.0, -static_cast<int>(k) - 1);
  for (const auto& [k, p] : sim) exact.try_emplace(k, drone_age_pmf(1.0, 1.0, k));
  const double tv = total_variation(exact, sim);
  return {tv < kDroneAgeTv, fmt::format("TV={:.5f} (< {})", tv, kDroneAgeTv)};
}

Outcome renewal_mean() {
  struct Case {
    MobilityKind kind;
    std::size_t f;
  };
  const std::vector<Case> cases{{MobilityKind::FullyConnected, 2},
                                {MobilityKind::FullyConnected, 4},
                                {MobilityKind::FullyConnected, 10},
                                {MobilityKind::Ring, 5}};
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 200;
  for (const Case& c : cases) {
    std::vector<double> means;
    for (double lm : {0.5, 10.0}) {
      NetworkConfig cfg = network(c.f, c.f, c.kind, lm, 1.0);
      cfg.lambda_e = 0.1;
      cfg.lambda_s = 0.1;
      const StationaryDistribution pi = stationary_distribution(build_generator(cfg.mobility));
      const double expected = 1.0 / (pi.probs[0] * cfg.lambda_d);
      cfg.horizon = horizon_for(kRenewalSamples, expected, cfg.burn_in_fraction);
      cfg.seed = seed++;
      const RenewalSummary s = measure_renewals(run(cfg), 0);
      const double rel = std::abs(s.mean - expected) / expected;
      ok = ok && rel <= kRenewalMeanRel && s.count >= kMinRenewalSamples;
      detail += fmt::format(" {}{}/lm={}: {:.4f} vs {:.4f} (n={});", to_string(c.kind), c.f, lm,
                            s.mean, expected, s.count);
      means.push_back(s.mean);
    }
    const double drift = std::abs(means[0] - means[1]) / means[1];
    ok = ok && drift <= kLambdaMInvarianceRel;
    detail += fmt::format(" lm-drift {:.4f};", drift);
  }
  return {ok, detail};
}

Outcome renewal_variance() {
  bool ok = true;
  double worst = 0.0;
  for (std::size_t f = 1; f <= 100; ++f) {
    for (auto [lm, ld] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.7}, std::pair{13.0, 0.4}}) {
      const MobilitySpec spec{MobilityKind::FullyConnected, f, lm, std::nullopt};
      const RenewalMoments solved = renewal_moments(build_subgenerator(build_generator(spec), ld, 0));
      const RenewalMoments closed = fully_connected_moments(f, lm, ld);
      const double rel = std::abs(solved.variance - closed.variance) / closed.variance;
      worst = std::max(worst, rel);
    }
  }
  ok = worst <= kClosedFormRel;
  const double analytic = fully_connected_moments(2, 1.0, 1.0).variance;
  ok = ok && analytic == 6.0;

  NetworkConfig cfg = network(2, 2, MobilityKind::FullyConnected, 1.0, 1.0);
  cfg.lambda_e = 0.1;
  cfg.lambda_s = 0.1;
  cfg.horizon = horizon_for(kVarianceSamples, 2.0, cfg.burn_in_fraction);
  cfg.seed = 300;
  const RenewalSummary s = measure_renewals(run(cfg), 0);
  const double rel = std::abs(s.variance - analytic) / analytic;
  ok = ok && rel <= kRenewalVarRel && s.count >= kMinRenewalSamples;
  return {ok, fmt::format("solve vs closed form worst rel {:.2e} over f=1..100; analytic {}; "
                          "simulated {:.4f} (rel {:.4f}, n={})",
                          worst, analytic, s.variance, rel, s.count)};
}

Outcome solve_structure() {
  Rng rng(400);
  double worst_equal = 0.0;
  double worst_closed = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t f = 2 + rng.below(99);
    const double lm = std::exp(std::log(0.05) + rng.uniform() * std::log(2000.0));
    const double ld = std::exp(std::log(0.05) + rng.uniform() * std::log(2000.0));
    const MobilitySpec spec{MobilityKind::FullyConnected, f, lm, std::nullopt};
    const AbsorptionSolution sol = solve_absorption(build_subgenerator(build_generator(spec), ld, 0));
    const double x2 = sol.x[1];
    for (std::size_t j = 2; j < f; ++j) {
      worst_equal = std::max(worst_equal, std::abs(sol.x[j] - x2) / x2);
    }
    const double closed = fully_connected_off_target_mean(f, lm, ld);
    worst_closed = std::max(worst_closed, std::abs(x2 - closed) / closed);
  }
  const bool ok = worst_equal <= kClosedFormRel && worst_closed <= kClosedFormRel;
  return {ok, fmt::format("max rel spread x_2..x_f {:.2e}; max rel x_2 vs closed form {:.2e}",
                          worst_equal, worst_closed)};
}

double mean_age(const NetworkConfig& cfg) { return run(cfg).mean_node_age(); }

Outcome dual_bottleneck() {
  // Bandwidth-constrained: f ~ sqrt(n), lambda_m = n, lambda_d = sqrt(n).
  std::vector<std::pair<double, double>> points;
  std::vector<double> predictor;
  std::string detail = " bandwidth:";
  for (std::size_t n : {64u, 256u, 1024u}) {
    const auto root = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    NetworkConfig cfg = network(n, root, MobilityKind::FullyConnected, static_cast<double>(n),
                                static_cast<double>(root));
    cfg.lambda_e = 1.0;
    cfg.lambda_s = 10.0;
    cfg.lambda_gossip = 1.0;
    cfg.horizon = 2000.0;
    cfg.seed = 500 + n;
    const double age = mean_age(cfg);
    const double pred = static_cast<double>(cfg.f) / cfg.lambda_d +
                        std::log(static_cast<double>(n) / static_cast<double>(cfg.f));
    points.emplace_back(static_cast<double>(n), age);
    predictor.push_back(pred);
    detail += fmt::format(" n={} age {:.3f} pred {:.3f};", n, age, pred);
  }
  const bool trend = trend_ratio_check(points, predictor, kTrendBand);

  // Mobility-constrained: n=64, f=8, lambda_m = 1.
  auto mobility_case = [](double lm, double ld, std::uint64_t seed) {
    NetworkConfig cfg = network(64, 8, MobilityKind::FullyConnected, lm, ld);
    cfg.lambda_e = 1.0;
    cfg.lambda_s = 10.0;
    cfg.lambda_gossip = 1.0;
    cfg.horizon = 1e5;
    cfg.seed = seed;
    return mean_age(cfg);
  };
  const double a10 = mobility_case(1.0, 10.0, 510);
  const double a100 = mobility_case(1.0, 100.0, 511);
  const double a100_slow = mobility_case(0.5, 100.0, 512);
  const double flat = std::abs(a100 - a10) / a10;
  const double factor = a100_slow / a100;
  const bool mob = flat < kFlatAgeRel && factor >= kHalvedMobilityLow && factor <= kHalvedMobilityHigh;
  detail += fmt::format(" trend {}; mobility: ld=10 {:.3f}, ld=100 {:.3f} (change {:.3f}), "
                        "lm=0.5 {:.3f} (factor {:.3f})",
                        trend ? "ok" : "off", a10, a100, flat, a100_slow, factor);
  return {trend && mob, detail};
}

Outcome degenerate_cases() {
  std::vector<std::pair<double, double>> single;
  std::vector<double> single_pred;
  std::vector<std::pair<double, double>> isolated;
  std::vector<double> isolated_pred;
  std::string detail;
  for (std::size_t n : {64u, 256u, 1024u}) {
    NetworkConfig one = network(n, 1, MobilityKind::FullyConnected, 1.0, 10.0);
    one.lambda_e = 1.0;
    one.lambda_s = 10.0;
    one.lambda_gossip = 1.0;
    one.horizon = 2000.0;
    one.seed = 600 + n;
    const double a1 = mean_age(one);
    single.emplace_back(static_cast<double>(n), a1);
    single_pred.push_back(std::log(static_cast<double>(n)));

    NetworkConfig all = network(n, n, MobilityKind::FullyConnected, 1.0, 1.0);
    all.lambda_e = 1.0;
    all.lambda_s = 10.0;
    all.horizon = 400.0 * static_cast<double>(n);
    all.seed = 700 + n;
    const double an = mean_age(all);
    isolated.emplace_back(static_cast<double>(n), an);
    isolated_pred.push_back(static_cast<double>(n) / std::min(all.move_rate(), all.lambda_d));
    detail += fmt::format(" n={}: f=1 age {:.3f}, f=n age {:.1f};", n, a1, an);
  }
  const bool ok1 = trend_ratio_check(single, single_pred, kTrendBand);
  const bool okn = trend_ratio_check(isolated, isolated_pred, kTrendBand);
  detail += fmt::format(" f=1 trend {}, f=n trend {}", ok1 ? "ok" : "off", okn ? "ok" : "off");
  return {ok1 && okn, detail};
}

Outcome dissemination_lag() {
  std::vector<std::pair<double, double>> points;
  std::vector<double> predictor;
  std::string detail;
  for (std::size_t n : {8u, 64u, 512u}) {
    NetworkConfig cfg = network(n, 1, MobilityKind::FullyConnected, 1e-6, 0.01);
    cfg.lambda_e = 0.02;
    cfg.lambda_s = 10.0;
    cfg.lambda_gossip = 1.0;
    cfg.horizon = 1e5;
    cfg.seed = 800 + n;
    const LagSummary lag = measure_dissemination_lag(run(cfg), 0);
    points.emplace_back(static_cast<double>(n), lag.mean);
    predictor.push_back(std::log(static_cast<double>(n)));
    detail += fmt::format(" n/f={}: lag {:.3f} (push oracle {:.3f}, samples {});", n, lag.mean,
                          oracle::push_spread_time(n, 1.0, cfg.lambda_d), lag.count);
  }
  const bool ok = trend_ratio_check(points, predictor, kLagBand);
  return {ok, detail};
}

Outcome lazy_equals_brute_force() {
  std::size_t mismatches = 0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng pick(900, s);
    const std::size_t f = 1 + pick.below(4);
    const std::size_t per = 1 + pick.below(8 / f);
    NetworkConfig cfg = network(f * per, f,
                                pick.below(2) ? MobilityKind::Ring : MobilityKind::FullyConnected,
                                0.5 + 3 * pick.uniform(), 0.5 + 3 * pick.uniform());
    cfg.lambda_e = 0.5 + 3 * pick.uniform();
    cfg.lambda_s = 0.5 + 3 * pick.uniform();
    cfg.lambda_gossip = 3 * pick.uniform();
    cfg.horizon = 100.0;
    cfg.seed = 1000 + s;
    oracle::BruteForceAges brute;
    const RunReport r = run(cfg, &brute);
    violations += brute.violations;
    const std::vector<double> expected = brute.averages();
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (std::memcmp(&expected[i], &r.per_node_avg_age[i], sizeof(double)) != 0) ++mismatches;
    }
  }
  return {mismatches == 0 && violations == 0,
          fmt::format("20 seeds, {} bitwise mismatches, {} ordering violations", mismatches,
                      violations)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "drone_gossip_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({
  "base": {"n": 32, "f": 4, "lambda_e": 1, "lambda_s": 5, "lambda_gossip": 1, "lambda_d": 4,
           "mobility": {"kind": "ring", "move_rate": 2}, "horizon": 2000, "seed": 9},
  "sweep": {"parameter": "lambda_d", "values": [1, 4, 16]},
  "replications": 3
})";
  std::ostringstream sink;
  bool ok = true;
  std::size_t bytes = 0;
  for (auto cmd : {&cli::cmd_simulate, &cli::cmd_sweep}) {
    std::vector<std::string> outputs;
    for (const char* tag : {"first", "second"}) {
      cli::CommandOptions opts;
      opts.config_path = config;
      opts.output = (dir / tag).string();
      opts.seed = 42;
      opts.quiet = true;
      ok = ok && cmd(opts, sink, sink) == cli::kExitOk;
      std::string all;
      for (const char* file : {"simulate_cells.csv", "simulate_nodes.csv", "sweep.csv"}) {
        if (fs::exists(dir / tag / file)) all += slurp(dir / tag / file);
      }
      outputs.push_back(all);
    }
    ok = ok && !outputs[0].empty() && outputs[0] == outputs[1];
    bytes += outputs[0].size();
  }
  fs::remove_all(dir);
  return {ok, fmt::format("simulate + sweep CSVs identical across two runs ({} bytes)", bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"AC1 drone-age geometric law", drone_age_law},
      {"AC2 renewal mean 1/(pi_1 lambda_d)", renewal_mean},
      {"AC3 renewal variance", renewal_variance},
      {"AC4 fully-connected solve structure", solve_structure},
      {"AC5 dual-bottleneck trends", dual_bottleneck},
      {"AC6 degenerate f=1 and f=n", degenerate_cases},
      {"AC7 dissemination lag ~ ln(n/f)", dissemination_lag},
      {"AC8 lazy ages equal brute force", lazy_equals_brute_force},
      {"AC9 determinism", determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

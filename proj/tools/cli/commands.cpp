#include "cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "cli/runner.hpp"
#include "drone_gossip/ctmc.hpp"
#include "drone_gossip/engine.hpp"
#include "drone_gossip/matrix.hpp"
#include "drone_gossip/metrics.hpp"
#include "drone_gossip/phasetype.hpp"
#include "drone_gossip/rng.hpp"

namespace drone_gossip::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr std::size_t kCompareBatches = 20;
inline constexpr std::size_t kSliceBatches = 10;
inline constexpr std::size_t kMinRenewalSamples = 1000;
inline constexpr double kPmfTailMass = 1e-12;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (!std::isfinite(x)) return "";
  return fmt::format("{:.12g}", x);
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

ExperimentConfig load(const CommandOptions& opts) {
  ExperimentConfig exp;
  try {
    exp = load_experiment(opts.config_path);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
  if (opts.seed) exp.base.seed = *opts.seed;
  if (opts.output) exp.output_path = *opts.output;
  if (opts.tolerance_renewal_mean) exp.tolerances.renewal_mean = *opts.tolerance_renewal_mean;
  if (opts.tolerance_renewal_var) exp.tolerances.renewal_var = *opts.tolerance_renewal_var;
  for (auto [name, value] : {std::pair{"tolerance-renewal-mean", exp.tolerances.renewal_mean},
                             std::pair{"tolerance-renewal-var", exp.tolerances.renewal_var}}) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(name, "must be positive");
  }
  exp.base.validate();
  return exp;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << contents;
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const ReducibleChainError& e) {
    err << "error: mobility.custom_generator: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}

json config_json(const NetworkConfig& cfg) {
  json mob = {{"kind", std::string(to_string(cfg.mobility.kind))},
              {"num_cells", cfg.mobility.num_cells},
              {"move_rate", cfg.mobility.move_rate}};
  if (cfg.mobility.custom_generator) {
    const Matrix& q = *cfg.mobility.custom_generator;
    json rows = json::array();
    for (std::size_t i = 0; i < q.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < q.cols(); ++j) row.push_back(q(i, j));
      rows.push_back(row);
    }
    mob["custom_generator"] = rows;
  }
  return {{"n", cfg.n},
          {"f", cfg.f},
          {"lambda_e", cfg.lambda_e},
          {"lambda_s", cfg.lambda_s},
          {"lambda_gossip", cfg.lambda_gossip},
          {"lambda_d", cfg.lambda_d},
          {"mobility", mob},
          {"horizon", cfg.horizon},
          {"burn_in_fraction", cfg.burn_in_fraction},
          {"seed", cfg.seed}};
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return std::nan("");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double unbiased_variance(std::span<const double> xs) {
  if (xs.size() < 2) return std::nan("");
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

std::vector<double> pooled(const std::vector<std::vector<double>>& per_cell) {
  std::vector<double> all;
  for (const auto& xs : per_cell) all.insert(all.end(), xs.begin(), xs.end());
  return all;
}

double slice_ci(const RunReport& report) {
  if (report.mean_age_slices.size() < 2 * kSliceBatches) return std::nan("");
  return batch_means(report.mean_age_slices, kSliceBatches).ci_halfwidth;
}

// ---- simulate ----

int simulate_body(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig exp = load(opts);
  const NetworkConfig& cfg = exp.base;
  const RunReport report = run(cfg);
  const fs::path dir(exp.output_path);

  std::string cells = std::string(kCellsCsvHeader) + "\n";
  json cells_json = json::array();
  for (std::size_t c = 0; c < cfg.f; ++c) {
    const auto& ren = report.renewal_samples[c];
    const auto& ret = report.return_time_samples[c];
    const auto& lag = report.dissemination_lag_samples[c];
    cells += fmt::format("{},{},{},{},{},{},{},{},{}\n", c, num(report.min_cell_age_avg[c]),
                         ren.size(), num(mean_of(ren)), num(unbiased_variance(ren)), ret.size(),
                         num(mean_of(ret)), lag.size(), num(mean_of(lag)));
    cells_json.push_back({{"cell", c},
                          {"min_cell_age", jnum(report.min_cell_age_avg[c])},
                          {"renewal_count", ren.size()},
                          {"renewal_mean", jnum(mean_of(ren))},
                          {"renewal_var", jnum(unbiased_variance(ren))},
                          {"return_count", ret.size()},
                          {"return_mean", jnum(mean_of(ret))},
                          {"lag_count", lag.size()},
                          {"lag_mean", jnum(mean_of(lag))}});
  }

  std::string nodes = std::string(kNodesCsvHeader) + "\n";
  const std::size_t m = cfg.cell_size();
  for (std::size_t i = 0; i < cfg.n; ++i) {
    nodes += fmt::format("{},{},{}\n", i, i / m, num(report.per_node_avg_age[i]));
  }

  json pmf = json::object();
  for (const auto& [k, p] : report.drone_age_histogram) pmf[std::to_string(k)] = p;
  json counts = json::object();
  for (std::size_t k = 0; k < kNumEventKinds; ++k) {
    counts[std::string(to_string(static_cast<EventKind>(k)))] = report.event_counts[k];
  }
  json doc = {{"config", config_json(cfg)},
              {"window_start", report.window_start},
              {"window_end", report.window_end},
              {"mean_node_age", jnum(report.mean_node_age())},
              {"mean_node_age_ci", jnum(slice_ci(report))},
              {"per_node_avg_age", report.per_node_avg_age},
              {"drone_age_pmf", pmf},
              {"event_counts", counts},
              {"final_source_version", report.final_source_version},
              {"cells", cells_json}};

  write_file(dir / "simulate_cells.csv", cells);
  write_file(dir / "simulate_nodes.csv", nodes);
  write_file(dir / "simulate.json", doc.dump(2) + "\n");
  if (!opts.quiet) {
    out << fmt::format("mean node age {} over [{}, {}]; wrote {}\n", num(report.mean_node_age()),
                       num(report.window_start), num(report.window_end), dir.string());
  }
  return kExitOk;
}

// ---- analyze ----

json analyze_json(const NetworkConfig& cfg) {
  const GeneratorMatrix gen = build_generator(cfg.mobility);
  const StationaryDistribution pi = stationary_distribution(gen);

  json cells = json::array();
  std::vector<RenewalMoments> moments;
  for (std::size_t t = 0; t < cfg.f; ++t) {
    const RenewalMoments rm = renewal_moments(build_subgenerator(gen, cfg.lambda_d, t));
    moments.push_back(rm);
    cells.push_back({{"cell", t},
                     {"mean", rm.mean},
                     {"variance", rm.variance},
                     {"second_moment", rm.second_moment},
                     {"inverse_stationary_rate", 1.0 / (pi.probs[t] * cfg.lambda_d)}});
  }
  const RegimeReport regime = classify_regime(cfg);
  const RenewalMoments& rm0 = moments.front();

  json doc = {{"mean", rm0.mean},
              {"variance", rm0.variance},
              {"second_moment", rm0.second_moment},
              {"regime", std::string(to_string(regime.regime))},
              {"dominant_term", regime.dominant_term},
              {"gossip_term", regime.gossip_term},
              {"stationary_distribution", pi.probs},
              {"cells", cells},
              {"regime_report",
               {{"regime", std::string(to_string(regime.regime))},
                {"dominant_term", regime.dominant_term},
                {"gossip_term", regime.gossip_term},
                {"predicted_age_scale", regime.predicted_age_scale}}}};

  const bool fc = cfg.mobility.kind == MobilityKind::FullyConnected;
  if (fc) {
    const RenewalMoments closed = fully_connected_moments(cfg.f, cfg.move_rate(), cfg.lambda_d);
    json fcj = {{"mean", closed.mean},
                {"variance", closed.variance},
                {"second_moment", closed.second_moment}};
    if (cfg.f >= 2) {
      fcj["off_target_mean"] = fully_connected_off_target_mean(cfg.f, cfg.move_rate(), cfg.lambda_d);
    }
    doc["fully_connected"] = fcj;
  }

  json table = json::array();
  for (double g : {2.0, 5.0, 10.0, 20.0}) {
    const double threshold = static_cast<double>(cfg.f) * g / (2.0 * cfg.lambda_d);
    const double bound = fc ? chebyshev_tail_bound(cfg.f, cfg.move_rate(), cfg.lambda_d, g)
                            : std::min(1.0, rm0.variance / (threshold * threshold));
    table.push_back({{"g", g}, {"threshold", threshold}, {"bound", bound}});
  }
  doc["chebyshev_bound"] = table;
  return doc;
}

int analyze_body(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig exp = load(opts);
  const std::string text = analyze_json(exp.base).dump(2) + "\n";
  write_file(fs::path(exp.output_path) / "analyze.json", text);
  if (!opts.quiet) out << text;
  return kExitOk;
}

// ---- compare ----

std::vector<RunReport> run_replications(const NetworkConfig& base, std::size_t replications) {
  std::vector<RunReport> reports(replications);
  parallel_for(replications, worker_count(), [&](std::size_t r) {
    NetworkConfig cfg = base;
    cfg.seed = derive_seed(base.seed, r);
    reports[r] = run(cfg);
  });
  return reports;
}

ComparisonRecord insufficient(Quantity q, std::optional<double> analytical, std::size_t count,
                              double tolerance) {
  ComparisonRecord r;
  r.quantity = q;
  r.analytical = analytical;
  r.simulated.mean = std::nan("");
  r.simulated.ci_halfwidth = std::nan("");
  r.simulated.num_samples = count;
  r.tolerance = tolerance;
  r.pass = false;
  return r;
}

SummaryStat variance_stat(std::span<const double> xs) {
  const double m = mean_of(xs);
  const double n = static_cast<double>(xs.size());
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  SummaryStat s = batch_means(sq, kCompareBatches);
  s.mean = unbiased_variance(xs);
  s.ci_halfwidth *= n / (n - 1.0);
  s.num_samples = xs.size();
  return s;
}

Pmf analytic_drone_pmf(double lambda_e, double lambda_s, const Pmf& support) {
  Pmf p;
  double mass = 0.0;
  for (std::uint64_t k = 0; mass < 1.0 - kPmfTailMass; ++k) {
    const double pk = drone_age_pmf(lambda_e, lambda_s, k);
    if (pk == 0.0) break;
    p[k] = pk;
    mass += pk;
  }
  for (const auto& entry : support) {
    if (!p.contains(entry.first)) p[entry.first] = drone_age_pmf(lambda_e, lambda_s, entry.first);
  }
  return p;
}

std::string record_row(const ComparisonRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", to_string(r.quantity), num(r.analytical),
                     num(r.simulated.mean), num(r.simulated.ci_halfwidth), r.simulated.num_samples,
                     num(r.relative_error), num(r.tolerance), r.pass ? "pass" : "fail");
}

int compare_body(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig exp = load(opts);
  const NetworkConfig& cfg = exp.base;
  const Tolerances& tol = exp.tolerances;
  const GeneratorMatrix gen = build_generator(cfg.mobility);
  stationary_distribution(gen);
  const RenewalMoments analytic = renewal_moments(build_subgenerator(gen, cfg.lambda_d, 0));

  const std::vector<RunReport> reports = run_replications(cfg, exp.replications);

  std::vector<double> renewals;
  std::vector<double> slices;
  std::vector<double> lags;
  std::vector<std::size_t> per_cell(cfg.f, 0);
  Pmf drone_pmf;
  for (const RunReport& rep : reports) {
    renewals.insert(renewals.end(), rep.renewal_samples[0].begin(), rep.renewal_samples[0].end());
    slices.insert(slices.end(), rep.mean_age_slices.begin(), rep.mean_age_slices.end());
    const auto all_lags = pooled(rep.dissemination_lag_samples);
    lags.insert(lags.end(), all_lags.begin(), all_lags.end());
    for (std::size_t c = 0; c < cfg.f; ++c) per_cell[c] += rep.renewal_samples[c].size();
    for (const auto& [k, p] : rep.drone_age_histogram) {
      drone_pmf[k] += p / static_cast<double>(reports.size());
    }
  }
  for (std::size_t c = 0; c < cfg.f; ++c) {
    if (per_cell[c] < kMinRenewalSamples) {
      err << fmt::format("warning: horizon: cell {} has only {} renewal samples (want >= {})\n", c,
                         per_cell[c], kMinRenewalSamples);
    }
  }

  std::vector<ComparisonRecord> records;
  if (renewals.size() >= 2 * kCompareBatches) {
    records.push_back(compare_scalar(Quantity::RenewalMean, analytic.mean,
                                     batch_means(renewals, kCompareBatches), tol.renewal_mean));
    records.push_back(compare_scalar(Quantity::RenewalVariance, analytic.variance,
                                     variance_stat(renewals), tol.renewal_var));
  } else {
    records.push_back(insufficient(Quantity::RenewalMean, analytic.mean, renewals.size(), tol.renewal_mean));
    records.push_back(
        insufficient(Quantity::RenewalVariance, analytic.variance, renewals.size(), tol.renewal_var));
  }
  if (drone_pmf.empty()) {
    records.push_back(insufficient(Quantity::DroneAgePmf, std::nullopt, 0, tol.drone_age_tv));
  } else {
    records.push_back(compare_pmf(analytic_drone_pmf(cfg.lambda_e, cfg.lambda_s, drone_pmf),
                                  drone_pmf, tol.drone_age_tv));
  }
  if (slices.size() >= 2 * kSliceBatches) {
    records.push_back(informational(Quantity::AvgNodeAge, batch_means(slices, kSliceBatches)));
  }
  if (lags.size() >= 2 * kSliceBatches) {
    records.push_back(informational(Quantity::DisseminationLag, batch_means(lags, kSliceBatches)));
  }

  std::string csv = std::string(kCompareCsvHeader) + "\n";
  bool all_pass = true;
  for (const auto& r : records) {
    csv += record_row(r);
    all_pass = all_pass && r.pass;
  }
  const fs::path path = fs::path(exp.output_path) / "compare.csv";
  write_file(path, csv);
  if (!opts.quiet) out << csv;
  if (!all_pass) {
    err << "compare: at least one quantity is outside tolerance\n";
    return kExitCompareFailed;
  }
  return kExitOk;
}

// ---- sweep ----

struct SweepRow {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  double avg_age = std::nan("");
  double avg_age_ci = std::nan("");
  double renewal_mean = std::nan("");
  double renewal_var = std::nan("");
  double min_cell_age = std::nan("");
  double lag = std::nan("");
  double predicted = std::nan("");
};

SweepRow sweep_run(const NetworkConfig& cfg) {
  SweepRow row;
  row.seed = cfg.seed;
  const RunReport report = run(cfg);
  row.avg_age = report.mean_node_age();
  row.avg_age_ci = slice_ci(report);
  const auto& ren = report.renewal_samples[0];
  row.renewal_mean = mean_of(ren);
  row.renewal_var = unbiased_variance(ren);
  row.min_cell_age = mean_of(report.min_cell_age_avg);
  row.lag = mean_of(pooled(report.dissemination_lag_samples));
  row.predicted = classify_regime(cfg).predicted_age_scale;
  row.ok = true;
  return row;
}

int sweep_body(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig exp = load(opts);
  if (!exp.sweep) throw ConfigError("sweep", "missing; the sweep command needs a sweep block");
  const SweepSpec& sweep = *exp.sweep;
  const std::size_t reps = exp.replications;
  const std::size_t points = sweep.values.size();

  std::vector<std::optional<NetworkConfig>> configs(points);
  bool invalid = false;
  for (std::size_t v = 0; v < points; ++v) {
    try {
      configs[v] = apply_sweep_value(exp.base, sweep, sweep.values[v]);
    } catch (const ConfigError& e) {
      err << fmt::format("error: invalid sweep value {}={}: {}\n", to_string(sweep.parameter),
                         num(sweep.values[v]), e.what());
      invalid = true;
    }
  }

  std::vector<SweepRow> rows(points * reps);
  parallel_for(rows.size(), worker_count(), [&](std::size_t i) {
    const std::size_t v = i / reps;
    if (!configs[v]) return;
    NetworkConfig cfg = *configs[v];
    cfg.seed = derive_seed(exp.base.seed, i);
    try {
      rows[i] = sweep_run(cfg);
    } catch (const std::exception& e) {
      rows[i].seed = cfg.seed;
      rows[i].error = e.what();
    }
  });

  const std::string param(to_string(sweep.parameter));
  std::string csv = std::string(kSweepCsvHeader) + "\n";
  std::vector<std::pair<double, double>> points_measured;
  std::vector<double> predictor;
  bool run_failed = false;
  for (std::size_t v = 0; v < points; ++v) {
    double age_sum = 0.0;
    std::size_t age_count = 0;
    double predicted = std::nan("");
    for (std::size_t r = 0; r < reps; ++r) {
      const SweepRow& row = rows[v * reps + r];
      if (!configs[v]) continue;
      if (!row.ok) {
        err << fmt::format("error: run {}={} replication {} failed: {}\n", param,
                           num(sweep.values[v]), r, row.error);
        run_failed = true;
        continue;
      }
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", param, num(sweep.values[v]), r,
                         row.seed, num(row.avg_age), num(row.avg_age_ci), num(row.renewal_mean),
                         num(row.renewal_var), num(row.min_cell_age), num(row.lag),
                         num(row.predicted));
      if (std::isfinite(row.avg_age)) {
        age_sum += row.avg_age;
        ++age_count;
      }
      predicted = row.predicted;
    }
    if (age_count > 0) {
      points_measured.emplace_back(sweep.values[v], age_sum / static_cast<double>(age_count));
      predictor.push_back(predicted);
    }
  }
  std::string verdict = "n/a";
  if (points_measured.size() >= 2) {
    verdict = trend_ratio_check(points_measured, predictor, exp.tolerances.trend) ? "pass" : "fail";
  }
  csv += fmt::format("{},verdict,,,{},,,,,,\n", param, verdict);

  write_file(fs::path(exp.output_path) / "sweep.csv", csv);
  if (!opts.quiet) out << csv;
  return (invalid || run_failed) ? kExitInvalidConfig : kExitOk;
}

}  // namespace

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return simulate_body(opts, out); });
}

int cmd_analyze(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return analyze_body(opts, out); });
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return compare_body(opts, out, err); });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return sweep_body(opts, out, err); });
}

}  // namespace drone_gossip::cli

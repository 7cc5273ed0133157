#include "cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace drone_gossip::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigError(name, "must be a JSON object");
  return j;
}

double get_real(const json& j, const std::string& name) {
  if (!j.is_number()) throw ConfigError(name, "must be a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& name) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) throw ConfigError(name, "must be nonnegative");
  throw ConfigError(name, "must be an integer");
}

Matrix parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ConfigError(name, "must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    if (!row.is_array()) throw ConfigError(name, "row " + std::to_string(i) + " is not an array");
    std::vector<double> values;
    for (const json& v : row) values.push_back(get_real(v, name));
    if (values.size() != j.size()) throw ConfigError(name, "must be square");
    rows.push_back(std::move(values));
  }
  return Matrix::from_rows(rows);
}

MobilitySpec parse_mobility(const json& j, std::size_t f) {
  require_object(j, "mobility");
  reject_unknown(j, "mobility", {"kind", "num_cells", "move_rate", "custom_generator"});
  MobilitySpec spec;
  spec.num_cells = f;
  if (!j.contains("kind")) throw ConfigError("mobility.kind", "missing");
  if (!j["kind"].is_string()) throw ConfigError("mobility.kind", "must be a string");
  auto kind = parse_mobility_kind(j["kind"].get<std::string>());
  if (!kind) throw ConfigError("mobility.kind", "expected fully_connected, ring or custom");
  spec.kind = *kind;
  if (j.contains("num_cells")) spec.num_cells = get_unsigned(j["num_cells"], "mobility.num_cells");
  if (spec.kind == MobilityKind::Custom) {
    if (!j.contains("custom_generator")) {
      throw ConfigError("mobility.custom_generator", "required for custom mobility");
    }
    spec.custom_generator = parse_matrix(j["custom_generator"], "mobility.custom_generator");
    if (j.contains("move_rate")) {
      spec.move_rate = get_real(j["move_rate"], "mobility.move_rate");
    } else {
      double max_exit = 0.0;
      const Matrix& q = *spec.custom_generator;
      for (std::size_t i = 0; i < q.rows(); ++i) max_exit = std::max(max_exit, -q(i, i));
      spec.move_rate = max_exit;
    }
  } else {
    if (j.contains("custom_generator")) {
      throw ConfigError("mobility.custom_generator", "only allowed for custom mobility");
    }
    if (!j.contains("move_rate")) throw ConfigError("mobility.move_rate", "missing");
    spec.move_rate = get_real(j["move_rate"], "mobility.move_rate");
  }
  return spec;
}

NetworkConfig parse_network(const json& j) {
  require_object(j, "base");
  reject_unknown(j, "base",
                 {"n", "f", "lambda_e", "lambda_s", "lambda_gossip", "lambda_d", "mobility",
                  "horizon", "burn_in_fraction", "seed"});
  for (const char* key : {"n", "f", "lambda_e", "lambda_s", "lambda_gossip", "lambda_d",
                          "mobility", "horizon"}) {
    if (!j.contains(key)) throw ConfigError(key, "missing");
  }
  NetworkConfig cfg;
  cfg.n = get_unsigned(j["n"], "n");
  cfg.f = get_unsigned(j["f"], "f");
  cfg.lambda_e = get_real(j["lambda_e"], "lambda_e");
  cfg.lambda_s = get_real(j["lambda_s"], "lambda_s");
  cfg.lambda_gossip = get_real(j["lambda_gossip"], "lambda_gossip");
  cfg.lambda_d = get_real(j["lambda_d"], "lambda_d");
  cfg.horizon = get_real(j["horizon"], "horizon");
  if (j.contains("burn_in_fraction")) {
    cfg.burn_in_fraction = get_real(j["burn_in_fraction"], "burn_in_fraction");
  }
  if (j.contains("seed")) cfg.seed = get_unsigned(j["seed"], "seed");
  cfg.mobility = parse_mobility(j["mobility"], cfg.f);
  return cfg;
}

std::optional<SweepParameter> parse_parameter(std::string_view name) {
  if (name == "n") return SweepParameter::N;
  if (name == "f") return SweepParameter::F;
  if (name == "lambda_d") return SweepParameter::LambdaD;
  if (name == "lambda_m") return SweepParameter::LambdaM;
  if (name == "lambda_gossip") return SweepParameter::LambdaGossip;
  return std::nullopt;
}

bool is_integral_parameter(SweepParameter p) {
  return p == SweepParameter::N || p == SweepParameter::F;
}

SweepSpec parse_sweep(const json& j) {
  require_object(j, "sweep");
  reject_unknown(j, "sweep", {"parameter", "values", "coupled"});
  if (!j.contains("parameter") || !j["parameter"].is_string()) {
    throw ConfigError("sweep.parameter", "must be one of n, f, lambda_d, lambda_m, lambda_gossip");
  }
  auto param = parse_parameter(j["parameter"].get<std::string>());
  if (!param) {
    throw ConfigError("sweep.parameter", "must be one of n, f, lambda_d, lambda_m, lambda_gossip");
  }
  SweepSpec sweep;
  sweep.parameter = *param;
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
    throw ConfigError("sweep.values", "must be a non-empty array");
  }
  for (const json& v : j["values"]) {
    if (is_integral_parameter(sweep.parameter)) {
      sweep.values.push_back(static_cast<double>(get_unsigned(v, "sweep.values")));
    } else {
      sweep.values.push_back(get_real(v, "sweep.values"));
    }
  }
  if (j.contains("coupled")) {
    const json& c = require_object(j["coupled"], "sweep.coupled");
    reject_unknown(c, "sweep.coupled", {"f", "lambda_m", "lambda_d", "lambda_gossip"});
    if (sweep.parameter != SweepParameter::N && !c.empty()) {
      throw ConfigError("sweep.coupled", "only supported when sweeping n");
    }
    for (const auto& [key, value] : c.items()) {
      sweep.coupled[key] = get_real(value, "sweep.coupled." + key);
    }
  }
  return sweep;
}

Tolerances parse_tolerances(const json& j) {
  require_object(j, "tolerances");
  reject_unknown(j, "tolerances",
                 {"renewal_mean", "renewal_var", "drone_age_tv", "trend_low", "trend_high"});
  Tolerances tol;
  auto read = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    out = get_real(j[key], std::string("tolerances.") + key);
    if (!(out > 0.0) || !std::isfinite(out)) {
      throw ConfigError(std::string("tolerances.") + key, "must be positive and finite");
    }
  };
  read("renewal_mean", tol.renewal_mean);
  read("renewal_var", tol.renewal_var);
  read("drone_age_tv", tol.drone_age_tv);
  read("trend_low", tol.trend.low);
  read("trend_high", tol.trend.high);
  if (tol.trend.low > tol.trend.high) throw ConfigError("tolerances.trend_low", "exceeds trend_high");
  return tol;
}

std::size_t nearest_divisor(std::size_t n, double target) {
  std::size_t best = 1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    double dist = std::abs(static_cast<double>(d) - target);
    if (dist < best_dist) {
      best = d;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::N: return "n";
    case SweepParameter::F: return "f";
    case SweepParameter::LambdaD: return "lambda_d";
    case SweepParameter::LambdaM: return "lambda_m";
    case SweepParameter::LambdaGossip: return "lambda_gossip";
  }
  return "?";
}

ExperimentConfig parse_experiment(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("json", e.what());
  }
  require_object(j, "config");
  reject_unknown(j, "", {"base", "sweep", "replications", "output_path", "tolerances"});
  if (!j.contains("base")) throw ConfigError("base", "missing");
  ExperimentConfig exp;
  exp.base = parse_network(j["base"]);
  if (j.contains("sweep") && !j["sweep"].is_null()) exp.sweep = parse_sweep(j["sweep"]);
  if (j.contains("replications")) {
    exp.replications = get_unsigned(j["replications"], "replications");
    if (exp.replications < 1) throw ConfigError("replications", "must be at least 1");
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) throw ConfigError("output_path", "must be a string");
    exp.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("tolerances")) exp.tolerances = parse_tolerances(j["tolerances"]);
  return exp;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

NetworkConfig apply_sweep_value(const NetworkConfig& base, const SweepSpec& sweep, double value) {
  NetworkConfig cfg = base;
  const bool custom = base.mobility.kind == MobilityKind::Custom;
  switch (sweep.parameter) {
    case SweepParameter::N: {
      cfg.n = static_cast<std::size_t>(value);
      const double n = static_cast<double>(cfg.n);
      for (const auto& [field, exponent] : sweep.coupled) {
        const double scaled = std::pow(n, exponent);
        if (field == "f") {
          if (custom) throw ConfigError("sweep.coupled.f", "cannot resize a custom generator");
          cfg.f = nearest_divisor(cfg.n, scaled);
          cfg.mobility.num_cells = cfg.f;
        } else if (field == "lambda_m") {
          cfg.mobility.move_rate = scaled;
        } else if (field == "lambda_d") {
          cfg.lambda_d = scaled;
        } else if (field == "lambda_gossip") {
          cfg.lambda_gossip = scaled;
        }
      }
      break;
    }
    case SweepParameter::F:
      if (custom) throw ConfigError("sweep.parameter", "cannot sweep f with a custom generator");
      cfg.f = static_cast<std::size_t>(value);
      cfg.mobility.num_cells = cfg.f;
      break;
    case SweepParameter::LambdaD: cfg.lambda_d = value; break;
    case SweepParameter::LambdaM:
      if (custom) throw ConfigError("sweep.parameter", "cannot sweep lambda_m with a custom generator");
      cfg.mobility.move_rate = value;
      break;
    case SweepParameter::LambdaGossip: cfg.lambda_gossip = value; break;
  }
  cfg.validate();
  return cfg;
}

}  // namespace drone_gossip::cli

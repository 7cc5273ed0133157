#include "drone_gossip/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace drone_gossip {

SummaryStat batch_means(std::span<const double> samples, std::size_t num_batches) {
  if (num_batches < 2) throw std::invalid_argument("batch_means: need at least 2 batches");
  if (samples.size() < 2 * num_batches)
    throw std::invalid_argument("batch_means: need at least 2 samples per batch");

  const std::size_t per_batch = samples.size() / num_batches;
  const std::size_t used = per_batch * num_batches;
  const auto prefix = samples.first(used);

  SummaryStat s;
  s.num_batches = num_batches;
  s.num_samples = used;

  double total = 0.0;
  for (double x : prefix) total += x;
  s.mean = total / static_cast<double>(used);

  double ss = 0.0;
  for (double x : prefix) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(used - 1);

  std::vector<double> batch(num_batches, 0.0);
  for (std::size_t b = 0; b < num_batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = b * per_batch; i < (b + 1) * per_batch; ++i) acc += prefix[i];
    batch[b] = acc / static_cast<double>(per_batch);
  }
  double bm = 0.0;
  for (double v : batch) bm += v;
  bm /= static_cast<double>(num_batches);
  double bss = 0.0;
  for (double v : batch) bss += (v - bm) * (v - bm);
  const double batch_var = bss / static_cast<double>(num_batches - 1);
  s.ci_halfwidth = kNormalQuantile95 * std::sqrt(batch_var / static_cast<double>(num_batches));
  return s;
}

double total_variation(const Pmf& p, const Pmf& q) {
  double sum = 0.0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      sum += std::abs(a->second);
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      sum += std::abs(b->second);
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

bool trend_ratio_check(std::span<const std::pair<double, double>> points,
                       std::span<const double> predictor, TrendBand band) {
  if (points.size() != predictor.size())
    throw std::invalid_argument("trend_ratio_check: points and predictor lengths differ");
  if (points.size() < 2) throw std::invalid_argument("trend_ratio_check: need at least 2 points");
  for (double p : predictor)
    if (!(p > 0.0)) throw std::invalid_argument("trend_ratio_check: predictor must be positive");

  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double measured = points[i + 1].second / points[i].second;
    const double predicted = predictor[i + 1] / predictor[i];
    const double r = measured / predicted;
    if (!(r >= band.low && r <= band.high)) return false;
  }
  return true;
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::RenewalMean: return "renewal_mean";
    case Quantity::RenewalVariance: return "renewal_variance";
    case Quantity::DroneAgePmf: return "drone_age_pmf";
    case Quantity::AvgNodeAge: return "avg_node_age";
    case Quantity::DisseminationLag: return "dissemination_lag";
  }
  return "unknown";
}

ComparisonRecord compare_scalar(Quantity quantity, double analytical, const SummaryStat& simulated,
                                double tolerance) {
  ComparisonRecord r;
  r.quantity = quantity;
  r.analytical = analytical;
  r.simulated = simulated;
  r.tolerance = tolerance;
  if (analytical != 0.0) {
    r.relative_error = std::abs(simulated.mean - analytical) / std::abs(analytical);
    r.pass = *r.relative_error <= tolerance;
  } else {
    r.pass = std::abs(simulated.mean) <= tolerance;
  }
  return r;
}

ComparisonRecord compare_pmf(const Pmf& analytical, const Pmf& simulated, double tolerance) {
  ComparisonRecord r;
  r.quantity = Quantity::DroneAgePmf;
  r.tolerance = tolerance;
  const double tv = total_variation(analytical, simulated);
  r.simulated.mean = tv;
  r.relative_error = tv;
  r.pass = tv <= tolerance;
  return r;
}

ComparisonRecord informational(Quantity quantity, const SummaryStat& simulated) {
  ComparisonRecord r;
  r.quantity = quantity;
  r.simulated = simulated;
  r.pass = true;
  r.tolerance = std::nan("");
  return r;
}

}  // namespace drone_gossip

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "drone_gossip/pmf.hpp"

namespace drone_gossip {

/// Recommended minimum batch count for batch_means.
inline constexpr std::size_t kMinBatches = 10;
inline constexpr double kNormalQuantile95 = 1.96;

struct SummaryStat {
  double mean = 0.0;
  double variance = 0.0;      // unbiased sample variance of the used samples
  double ci_halfwidth = 0.0;  // 95%, from the spread of the batch averages
  std::size_t num_batches = 0;
  std::size_t num_samples = 0;
};

/// Splits `samples` in order into num_batches equal contiguous batches,
/// dropping the remainder. Requires num_batches >= 2 and at least
/// 2 * num_batches samples; throws std::invalid_argument otherwise.
SummaryStat batch_means(std::span<const double> samples, std::size_t num_batches);

/// Half the L1 distance over the union support.
double total_variation(const Pmf& p, const Pmf& q);

struct TrendBand {
  double low = 0.6;
  double high = 1.67;
};

/// True iff each consecutive growth ratio of the measured values stays
/// within `band` of the predictor's growth ratio. Points are (scale, value).
bool trend_ratio_check(std::span<const std::pair<double, double>> points,
                       std::span<const double> predictor, TrendBand band);

enum class Quantity { RenewalMean, RenewalVariance, DroneAgePmf, AvgNodeAge, DisseminationLag };
std::string_view to_string(Quantity q);

/// One analytics-vs-simulation check. For DroneAgePmf, relative_error holds
/// the total-variation distance and analytical is empty. Rows without an
/// analytical reference are informational and always pass.
struct ComparisonRecord {
  Quantity quantity = Quantity::RenewalMean;
  std::optional<double> analytical;
  SummaryStat simulated;
  std::optional<double> relative_error;
  bool pass = false;
  double tolerance = 0.0;
};

ComparisonRecord compare_scalar(Quantity quantity, double analytical, const SummaryStat& simulated,
                                double tolerance);
ComparisonRecord compare_pmf(const Pmf& analytical, const Pmf& simulated, double tolerance);
ComparisonRecord informational(Quantity quantity, const SummaryStat& simulated);

}  // namespace drone_gossip

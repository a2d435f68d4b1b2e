#pragma once

// Seeded Monte Carlo estimates of avoidance probabilities and of the
// relative covariance. Trials are grouped into batches; batches run on any
// number of workers and their integer counts are merged in batch order, so
// results depend only on (shape, event, config).

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bipcorr/dyadic.hpp"
#include "bipcorr/model.hpp"

namespace bipcorr {

struct McConfig {
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  std::uint64_t batch_size = 1u << 16;
  mpq_class p = mpq_class(1, 2);  // probability that an edge points X -> Y
  unsigned workers = 0;           // 0 = hardware concurrency
  /// Complement every edge draw. With p replaced by 1 - p this samples the
  /// reversal of the orientation the unreflected stream would give.
  bool reflect_draws = false;
};

/// Minimum batch count for batch-means intervals.
inline constexpr std::uint64_t kMinBatchesForBatchMeans = 30;

enum class CiMethod : std::uint8_t { Binomial, BatchMeans };
std::string_view ci_method_name(CiMethod m);

struct Estimate {
  double mean = 0;
  double std_error = 0;
  double ci_low = 0;   // 95%
  double ci_high = 0;
  std::uint64_t trials = 0;
  CiMethod method = CiMethod::Binomial;
  /// Set when a batch-means interval was wanted but too few batches ran.
  bool fallback = false;
};

struct RcEstimate {
  Estimate p_ac, p_bc, p_joint;
  Estimate covariance;
  std::optional<double> rc;  // empty when no trial hit the joint event
  /// From the covariance CI; Inconclusive when no trial hit the joint event.
  SignVerdict sign = SignVerdict::Inconclusive;
  std::uint64_t seed = 0;
};

/// Wilson score interval at 95%.
Estimate wilson_estimate(std::uint64_t hits, std::uint64_t trials);

/// The orientation trial `trial` of batch `batch` samples.
Orientation sample_orientation(const GraphShape& shape, const McConfig& cfg, std::uint64_t batch,
                               std::uint32_t trial);

Estimate mc_estimate_event(const GraphShape& shape, const AvoidanceEvent& event,
                           const McConfig& cfg);

RcEstimate mc_estimate_rc(const GraphShape& shape, PlacementKind placement, const McConfig& cfg);

/// Per-trial indicator of `event`, in trial order; for small property tests.
std::vector<bool> mc_indicator_stream(const GraphShape& shape, const AvoidanceEvent& event,
                                      const McConfig& cfg);

struct FeasibilityAdvice {
  double p_ac = 0, p_bc = 0, p_joint = 0;  // lemma predictions
  double log2_p_joint = 0;
  double trials_needed = 0;  // 1 / (p_joint * rel_err^2); may be +inf
  double budget = 0;
  bool feasible = false;
  std::string summary;
};

inline constexpr double kDefaultTrialBudget = 1e9;

FeasibilityAdvice feasibility(const GraphShape& shape, PlacementKind placement,
                              double target_rel_err, double budget = kDefaultTrialBudget);

}  // namespace bipcorr

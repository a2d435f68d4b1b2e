#pragma once

// Ground truth by complete enumeration of all 2^{mn} orientations.
//
// Enumeration runs over contiguous chunks of the index range on a worker
// pool. Each worker keeps integer tallies that are summed at the end, so
// results are bit-identical for every chunk size and worker count.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bipcorr/dyadic.hpp"
#include "bipcorr/model.hpp"
#include "bipcorr/reach_kernel.hpp"

namespace bipcorr {

inline constexpr unsigned kDefaultEnumerationCap = 24;
inline constexpr unsigned kHardEnumerationCeiling = 30;

struct EnumerationOptions {
  unsigned max_mn = kDefaultEnumerationCap;  // at most kHardEnumerationCeiling
  unsigned threads = 0;                      // 0: hardware concurrency
  std::uint64_t chunk_size = std::uint64_t{1} << 16;
};

/// Throws BudgetExceeded when shape.edge_count() exceeds the cap, and
/// InvalidArgument when the cap itself exceeds the hard ceiling.
void check_enumeration_cap(const GraphShape& shape, const EnumerationOptions& options);

/// Satisfying-orientation counts for one event, split by the number of
/// X -> Y flags (the popcount of the enumeration index).
class EventTally {
 public:
  /// by_flag_count[k] = satisfying orientations with k flags X -> Y.
  explicit EventTally(std::vector<std::uint64_t> by_flag_count)
      : by_flag_count_(std::move(by_flag_count)) {}

  std::span<const std::uint64_t> by_flag_count() const { return by_flag_count_; }
  std::uint64_t count() const;
  unsigned edge_count() const { return static_cast<unsigned>(by_flag_count_.size() - 1); }

  /// count / 2^{mn}.
  DyadicProb uniform() const;
  /// sum_k hist[k] p^k (1-p)^{mn-k}.
  mpq_class biased(const mpq_class& p) const;

 private:
  std::vector<std::uint64_t> by_flag_count_;
};

/// One enumeration pass evaluating every event on every orientation.
std::vector<EventTally> tally_events(const GraphShape& shape,
                                     std::span<const AvoidanceEvent> events,
                                     const EnumerationOptions& options = {});

/// Counts orientations satisfying an arbitrary predicate over the compact
/// kernel. The predicate must be safe to call concurrently.
std::uint64_t count_orientations(
    const GraphShape& shape,
    const std::function<bool(const kernel::CompactOrientation&)>& predicate,
    const EnumerationOptions& options = {});

DyadicProb exact_prob(const GraphShape& shape, const AvoidanceEvent& event,
                      const EnumerationOptions& options = {});

/// Each edge directed X -> Y independently with probability p in [0, 1].
mpq_class exact_prob_biased(const GraphShape& shape, const AvoidanceEvent& event,
                            const mpq_class& p, const EnumerationOptions& options = {});

struct ExactRcResult {
  mpq_class p;  // edge bias the values were computed at
  mpq_class p_ac;
  mpq_class p_bc;
  mpq_class p_joint;
  mpq_class covariance;     // p_joint - p_ac * p_bc
  std::optional<mpq_class> rc;  // covariance / p_joint; empty when p_joint = 0
  Sign sign = Sign::Zero;       // sign of the covariance

  /// Dyadic forms; present when p = 1/2.
  std::optional<DyadicProb> dyadic_ac, dyadic_bc, dyadic_joint;
  std::optional<Dyadic> dyadic_covariance;
};

/// Builds the result record from the three probabilities.
ExactRcResult make_rc_result(const mpq_class& p, const mpq_class& p_ac,
                             const mpq_class& p_bc, const mpq_class& p_joint);

/// Relative covariance of {x -/-> y} and {y -/-> z} from one enumeration pass.
/// Also counts {x -> y} and {y -> z} jointly and checks that
/// P(A and B) - P(A)P(B) equals the complemented covariance.
ExactRcResult exact_rc(const GraphShape& shape, PlacementKind placement,
                       const mpq_class& p = mpq_class(1, 2),
                       const EnumerationOptions& options = {});

}  // namespace bipcorr

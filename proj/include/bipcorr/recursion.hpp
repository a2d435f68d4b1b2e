#pragma once

// Exact polynomial-time computation of the f/g/h families by peeling: condition
// on the exact one-step out-neighbourhood of the constrained set, pay the
// forced edge directions, and recurse on the graph with that set removed.
//
// With a = X_0, b = X_1, d = Y_0, K a k-subset of X and L an l-subset of Y
// avoiding the distinguished vertices:
//   f_X(m,n,k) = P(K -/-> a)              f_Y(m,n,l) = P(L -/-> a)
//   g_X(m,n,k) = P(K -/-> b, b -/-> a)    g_Y(m,n,l) = P(L -/-> b, b -/-> a)
//   h_X(m,n,k) = P(K -/-> d, d -/-> a)    h_Y(m,n,l) = P(L -/-> d, d -/-> a)
//
// Two systems are available. Validated is the corrected system and matches
// enumeration exactly. AsPrinted reproduces the printed formulas verbatim,
// including the f_Y binomial/power/denominator and the h_Y denominator that
// disagree with the peeling argument; it exists so the discrepancy can be
// measured rather than asserted.
//
// Threading: a RecursionEngine owns a private memo table and is not safe for
// concurrent use. Distinct engines share nothing and may run in parallel.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bipcorr/bigfloat.hpp"
#include "bipcorr/dyadic.hpp"
#include "bipcorr/model.hpp"
#include "bipcorr/oracle.hpp"

namespace bipcorr {

enum class Family : std::uint8_t { FX, FY, GX, GY, HX, HY };

inline constexpr Family kAllFamilies[] = {Family::FX, Family::FY, Family::GX,
                                          Family::GY, Family::HX, Family::HY};

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

enum class Mode : std::uint8_t { AsPrinted, Validated };
enum class Backend : std::uint8_t { ExactDyadic, BigFloat };

std::string_view mode_name(Mode m);  // "printed" / "validated"
std::optional<Mode> parse_mode(std::string_view name);
std::string_view backend_name(Backend b);  // "exact" / "bigfloat"
std::optional<Backend> parse_backend(std::string_view name);

struct MemoKey {
  Family family = Family::FX;
  unsigned m = 0;
  unsigned n = 0;
  unsigned size = 0;  // k for the X families, l for the Y families

  friend bool operator==(const MemoKey&, const MemoKey&) = default;
};

/// Largest admissible size, or nullopt when (m, n) cannot host the family's
/// distinguished vertices.
std::optional<unsigned> max_size(Family family, unsigned m, unsigned n);
bool in_bounds(const MemoKey& key);
std::string to_string(const MemoKey& key);

/// The event a key's value is the probability of, with canonical vertices
/// a = X_0, b = X_1, d = Y_0 and the constrained set taking the next indices
/// (FX: X_1..X_k, GX: X_2..X_{k+1}, HX: X_1..X_k, FY/GY: Y_0..Y_{l-1},
/// HY: Y_1..Y_l). Empty for size-0 FX/FY keys (the sure event).
std::optional<AvoidanceEvent> defining_event(const MemoKey& key);

/// For GX/HX: the defining event plus {K -/-> a}. Empty otherwise or when k = 0.
std::optional<AvoidanceEvent> triple_event(const MemoKey& key);

struct RecurValue {
  std::optional<Dyadic> exact;
  std::optional<BigInterval> approx;
};

/// Deliberate defect for exercising the verification harness.
enum class Fault : std::uint8_t { None, NegateGY };

struct EngineOptions {
  /// Mantissa bits for BigFloat; 0 selects 4 * max(m, n) (at least 64) from
  /// the first top-level key evaluated.
  unsigned mantissa_bits = 0;
  /// Refuse keys whose estimated state count exceeds this.
  std::uint64_t state_budget = 10'000'000;
  /// BigFloat: throw PrecisionFailure when the relative error bound of a
  /// top-level result exceeds this.
  std::optional<double> max_relative_error;
  Fault fault = Fault::None;
};

/// Upper estimate of memo states needed for a key (all families it touches).
std::uint64_t estimated_states(const MemoKey& key);

class RecursionEngine {
 public:
  RecursionEngine(Mode mode, Backend backend, EngineOptions options = {});
  ~RecursionEngine();
  RecursionEngine(RecursionEngine&&) noexcept;
  RecursionEngine& operator=(RecursionEngine&&) noexcept;

  Mode mode() const { return mode_; }
  Backend backend() const { return backend_; }
  mpfr_prec_t precision() const { return precision_; }

  /// Throws InvalidArgument out of bounds, BudgetExceeded over the state
  /// budget, PrecisionFailure when the tolerance is not met.
  RecurValue eval(const MemoKey& key);

  /// One step of the printed formula for `key`, evaluated over children from
  /// the Validated system (exact backend). Isolates which printed formulas
  /// are wrong on their own rather than through propagation.
  Dyadic printed_step_over_validated(const MemoKey& key);

  std::size_t memo_size() const;

  struct Tables;  // opaque memo and coefficient caches

 private:

  Mode mode_;
  Backend backend_;
  EngineOptions options_;
  mpfr_prec_t precision_ = 0;
  std::unique_ptr<Tables> tables_;
};

RecurValue recur_eval(const MemoKey& key, Mode mode, Backend backend,
                      const EngineOptions& options = {});

enum class PairKind : std::uint8_t { XtoX, YtoX };

/// XtoX: f_X(m,n,1) = P(b -/-> a); YtoX: f_Y(m,n,1) = P(d -/-> a).
RecurValue single_pair_prob(RecursionEngine& engine, unsigned m, unsigned n, PairKind kind);

/// AllInX: g_X(m,n,1); XXY: g_Y(m,n,1); XYX: h_X(m,n,1).
RecurValue joint_prob(RecursionEngine& engine, unsigned m, unsigned n, PlacementKind placement);

struct ApproxRcResult {
  BigInterval p_ac, p_bc, p_joint, covariance, rc;
  SignVerdict sign = SignVerdict::Inconclusive;
};

struct RcRecursionResult {
  std::optional<ExactRcResult> exact;
  std::optional<ApproxRcResult> approx;
};

/// Relative covariance from the Validated system. AllInX uses f_X^2 and g_X,
/// XXY uses f_X f_Y and g_Y, XYX uses f_Y^2 and h_X (all at size 1).
RcRecursionResult rc_recursion(unsigned m, unsigned n, PlacementKind placement, Backend backend,
                               const EngineOptions& options = {});
RcRecursionResult rc_recursion(RecursionEngine& engine, unsigned m, unsigned n,
                               PlacementKind placement);

}  // namespace bipcorr

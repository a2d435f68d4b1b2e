#pragma once

// Result rows shared by every method, sweeps with convergence diagnostics,
// the n = 2^m probe and the cross-method consistency check.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bipcorr/asymptotics.hpp"
#include "bipcorr/montecarlo.hpp"
#include "bipcorr/oracle.hpp"
#include "bipcorr/recursion.hpp"

namespace bipcorr {

enum class Method : std::uint8_t { Oracle, Recursion, MC, Asymptotic, Skipped };
std::string_view method_name(Method m);  // "oracle", "recursion", "mc", "asymptotic", "skipped"
std::optional<Method> parse_method(std::string_view name);

/// One CSV/JSON row. Exact methods fill value strings ("num/2^e" for
/// uniform-model probabilities, "num/den" for rc and biased values) and leave
/// the error columns empty. MC and bigfloat rows describe the covariance in
/// stderr/ci_low/ci_high. Skipped rows carry their reason in `sign`.
struct AtlasRow {
  unsigned m = 0, n = 0;
  std::string placement;
  Method method = Method::Skipped;
  std::string p = "1/2";
  std::string p_ac, p_bc, p_joint, covariance, rc;
  std::string std_error, ci_low, ci_high;
  std::string sign;
  std::optional<std::uint64_t> trials, seed;
  double runtime_ms = 0;
  /// Numeric rc for diagnostics; empty when undefined or skipped.
  std::optional<double> rc_value;
};

inline constexpr std::string_view kCsvHeader =
    "m,n,placement,method,p,p_ac,p_bc,p_joint,covariance,rc,stderr,ci_low,ci_high,sign,trials,"
    "seed,runtime_ms";

std::string csv_line(const AtlasRow& row);
std::string rows_csv(const std::vector<AtlasRow>& rows);
/// {"schema_version": 1, "rows": [...]}.
std::string rows_json(const std::vector<AtlasRow>& rows);

AtlasRow oracle_row(unsigned m, unsigned n, PlacementKind placement,
                    const mpq_class& p = mpq_class(1, 2), const EnumerationOptions& options = {});
AtlasRow recursion_row(unsigned m, unsigned n, PlacementKind placement, Backend backend,
                       const EngineOptions& options = {});
AtlasRow mc_row(unsigned m, unsigned n, PlacementKind placement, const McConfig& cfg);
AtlasRow asymptotic_row(unsigned m, unsigned n, PlacementKind placement);
AtlasRow skipped_row(unsigned m, unsigned n, std::string placement, std::string reason);

/// Exact when m*n is at most this, otherwise bigfloat.
inline constexpr unsigned kAutoExactMaxMn = 256;
Backend auto_backend(unsigned m, unsigned n);

struct SweepSpec {
  std::vector<std::pair<unsigned, unsigned>> pairs;
  /// Beta rule: m = floor(beta * n) for each n in beta_n.
  std::optional<mpq_class> beta;
  std::vector<unsigned> beta_n;
  /// n = 2^m for each m.
  std::vector<unsigned> q2_m;
  std::vector<PlacementKind> placements{kAllPlacements, kAllPlacements + 3};
  std::vector<Method> methods{Method::Recursion};
  EnumerationOptions oracle;
  EngineOptions recursion;
  std::optional<Backend> backend;  // automatic when empty
  McConfig mc;
  double mc_target_rel_err = 0.1;
  double mc_budget = kDefaultTrialBudget;
};

/// Per (placement, beta) diagnostics for beta-rule sweeps.
struct ConvergenceCell {
  PlacementKind placement = PlacementKind::AllInX;
  mpq_class beta;
  BetaClass beta_class = BetaClass::EqualOne;
  std::vector<unsigned> m, n;
  std::vector<std::optional<double>> exact_rc;  // Validated recursion
  std::vector<double> estimate;                 // rc_finite_estimate
  mpq_class printed_limit;
  ComposedLimit composed;
  bool flagged = false;
  std::vector<std::string> reasons;
};

struct SweepResult {
  std::vector<AtlasRow> rows;
  std::vector<ConvergenceCell> convergence;
};

/// Shapes in the order pairs, beta rule, q2 rule; each shape crossed with
/// placements and methods. Cells that cannot run become skipped rows.
SweepResult run_sweep(const SweepSpec& spec);

std::string convergence_text(const std::vector<ConvergenceCell>& cells);
/// {"schema_version": 1, "rows": [...], "convergence": [...]}.
std::string sweep_json(const SweepResult& result);
std::string convergence_json(const std::vector<ConvergenceCell>& cells);

/// For each m, AllInX with the triple in the class of size m (shape
/// K_{m,2^m}, skipped for m < 3) and in the class of size 2^m (shape
/// K_{2^m,m}). Rows report the shape actually used.
struct Q2Options {
  unsigned m_min = 2, m_max = 6;
  EnumerationOptions oracle;
  EngineOptions recursion;
};

struct Q2Result {
  std::vector<AtlasRow> rows;
  /// Oracle against exact recursion wherever both ran; label is "small" or
  /// "large" (the class holding the triple).
  struct Agreement {
    unsigned m;
    std::string label;
    bool equal;
  };
  std::vector<Agreement> agreements;
};

Q2Result q2_probe(const Q2Options& options);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct VerifyOptions {
  unsigned max_mn = 16;
  unsigned property_max_mn = 12;
  std::uint64_t trials = 20'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  EngineOptions recursion;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<AtlasRow> rows;  // K_{3,1} exact rows and any failing shapes
  bool ok() const;
  std::size_t failures() const;
};

/// Exact rc from enumeration equals the recursion; MC means within 4 stderr
/// of enumeration; exhaustive property suites for m*n <= property_max_mn.
VerifyReport cmd_verify(const VerifyOptions& options);

std::string verify_text(const VerifyReport& report);
std::string verify_json(const VerifyReport& report);

/// Exhaustive property checks for one shape. Each returns failing-case
/// descriptions (empty on success).
std::vector<std::string> check_complement(const GraphShape& shape);
std::vector<std::string> check_reversal(const GraphShape& shape, const mpq_class& p);
std::vector<std::string> check_relabeling(const GraphShape& shape);
std::vector<std::string> check_mcdiarmid(const GraphShape& shape);
std::vector<std::string> check_forced_third_avoidance(const GraphShape& shape);

std::string format_double(double v);

}  // namespace bipcorr

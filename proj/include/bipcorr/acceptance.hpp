#pragma once

// Release gate: one pass/fail result per acceptance criterion. Tolerances
// are pinned here; golden files are read from `golden_dir`.

#include <string>
#include <vector>

namespace bipcorr::acceptance {

struct CriterionResult {
  std::string id;  // "1", "2", "3a", "3b", "4" .. "9"
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct Options {
  std::string golden_dir = "golden";
  unsigned threads = 0;
};

std::vector<CriterionResult> run_all(const Options& options);

/// "PASS [id] title: detail (1.23 s)".
std::string format_line(const CriterionResult& r);

// Pinned tolerances.
inline constexpr double kClosedFormTolerance = 1e-9;
inline constexpr double kProvisionalConvergenceTolerance = 0.05;
inline constexpr double kObservedPairMargin = 1e-6;    // XXY, XYX at n = 24
inline constexpr double kObservedAllInXMargin = 1e-5;  // AllInX at n = 24
inline constexpr int kCalibrationSeeds = 100;
inline constexpr int kCalibrationMinCovered = 90;
inline constexpr unsigned long kCalibrationTrials = 100'000;

}  // namespace bipcorr::acceptance

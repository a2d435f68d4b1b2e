#pragma once

// Cross-examination of both recursion systems against enumeration.

#include <optional>
#include <string>
#include <vector>

#include "bipcorr/dyadic.hpp"
#include "bipcorr/oracle.hpp"
#include "bipcorr/recursion.hpp"

namespace bipcorr {

struct ErratumRow {
  MemoKey key;
  Mode mode = Mode::Validated;
  Dyadic value;
  Dyadic oracle;
  bool match = false;
  /// AsPrinted only: one printed step evaluated over Validated children.
  std::optional<Dyadic> one_step;
  bool one_step_match = false;
};

/// GX/HX: the two-atom defining event against the event with {K -/-> a} added.
struct PairTripleRow {
  MemoKey key;
  Dyadic pair;
  Dyadic triple;
};

/// HY: Validated value against both candidate events.
struct HyCandidateRow {
  MemoKey key;
  Dyadic validated;
  Dyadic intended;                          // P(L -/-> d, d -/-> a)
  std::optional<Dyadic> literal_definition;  // P(L -/-> b, b -/-> a); needs m >= 2
};

struct FamilySummary {
  Family family = Family::FX;
  Mode mode = Mode::Validated;
  std::size_t keys = 0;
  std::size_t matches = 0;
  std::size_t one_step_matches = 0;  // AsPrinted only
  std::optional<MemoKey> first_mismatch;
};

struct ErratumReport {
  unsigned max_mn = 0;
  std::vector<ErratumRow> rows;
  std::vector<FamilySummary> summary;
  std::vector<PairTripleRow> gx_pair_triple;
  std::vector<PairTripleRow> hx_pair_triple;
  std::vector<HyCandidateRow> hy_candidates;
  std::vector<std::string> findings;

  bool validated_all_match() const;
  const ErratumRow* find(const MemoKey& key, Mode mode) const;
  const FamilySummary& summary_for(Family family, Mode mode) const;
};

/// Every in-bounds key with m, n >= 1 and m*n <= max_mn, in (m, n, family,
/// size) order.
ErratumReport erratum_report(unsigned max_mn, const EnumerationOptions& options = {});

/// JSON document with "schema_version": 1.
std::string erratum_json(const ErratumReport& report);
std::string erratum_text(const ErratumReport& report);

/// The two systems' step formulas in plain ASCII.
std::string printed_formula(Family family);
std::string validated_formula(Family family);

}  // namespace bipcorr

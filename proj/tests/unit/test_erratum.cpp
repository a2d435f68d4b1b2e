#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bipcorr/erratum.hpp"

using namespace bipcorr;

TEST_CASE("erratum report at m*n <= 12") {
  const ErratumReport r = erratum_report(12);
  CHECK(r.validated_all_match());

  const ErratumRow* fy = r.find({Family::FY, 3, 2, 1}, Mode::AsPrinted);
  REQUIRE(fy != nullptr);
  CHECK_FALSE(fy->match);
  CHECK_FALSE(fy->one_step_match);
  CHECK(fy->oracle.to_string() == "25/2^6");

  CHECK(r.summary_for(Family::FX, Mode::AsPrinted).one_step_matches ==
        r.summary_for(Family::FX, Mode::AsPrinted).keys);
  const FamilySummary& hy = r.summary_for(Family::HY, Mode::AsPrinted);
  CHECK(hy.one_step_matches < hy.keys);

  for (const PairTripleRow& row : r.gx_pair_triple) CHECK(row.pair == row.triple);
  for (const PairTripleRow& row : r.hx_pair_triple) CHECK(row.pair == row.triple);
  CHECK(r.gx_pair_triple.size() == 69);
  for (const HyCandidateRow& row : r.hy_candidates) CHECK(row.validated == row.intended);
  CHECK_FALSE(r.findings.empty());
}

TEST_CASE("erratum json matches the pinned report") {
  std::ifstream in(BIPCORR_GOLDEN_DIR "/erratum_report.json");
  REQUIRE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(erratum_json(erratum_report(12)) == golden.str());
}

TEST_CASE("formulas are rendered for every family") {
  for (Family f : kAllFamilies) {
    CHECK_FALSE(printed_formula(f).empty());
    CHECK_FALSE(validated_formula(f).empty());
  }
  CHECK(printed_formula(Family::FY) != validated_formula(Family::FY));
  CHECK(printed_formula(Family::FX) == validated_formula(Family::FX));
}

#include <doctest.h>

#include <cmath>

#include "bipcorr/asymptotics.hpp"
#include "bipcorr/errors.hpp"

using namespace bipcorr;

TEST_CASE("limit table") {
  CHECK(rc_limit(PlacementKind::AllInX, BetaClass::LessThanOne) == mpq_class(-1, 3));
  CHECK(rc_limit(PlacementKind::XXY, BetaClass::LessThanOne) == mpq_class(1, 2));
  CHECK(rc_limit(PlacementKind::XXY, BetaClass::EqualOne) == mpq_class(1, 5));
  CHECK(rc_limit(PlacementKind::XXY, BetaClass::GreaterThanOne) == -1);
  CHECK(rc_limit(PlacementKind::XYX, BetaClass::LessThanOne) == 1);
  CHECK(rc_limit(PlacementKind::XYX, BetaClass::GreaterThanOne) == 0);
}

TEST_CASE("beta classes") {
  CHECK(classify_beta(mpq_class(1, 2)) == BetaClass::LessThanOne);
  CHECK(classify_beta(mpq_class(1)) == BetaClass::EqualOne);
  CHECK(classify_beta(mpq_class(3, 2)) == BetaClass::GreaterThanOne);
  CHECK_THROWS_AS(classify_beta(mpq_class(0)), InvalidArgument);
}

TEST_CASE("lemma estimates") {
  CHECK(lemma_estimate(LemmaId::I, 4, 6) == doctest::Approx(2.0 / 64));
  CHECK(lemma_estimate(LemmaId::II, 4, 6) == doctest::Approx(1.0 / 16 + 1.0 / 64));
  CHECK(lemma_estimate(LemmaId::IV, 3, 3) == doctest::Approx(3.0 / 64));
  CHECK(lemma_log2_estimate(LemmaId::IV, 2000, 2000) == doctest::Approx(std::log2(3.0) - 4000));
  CHECK_THROWS_AS(lemma_estimate(LemmaId::I, 1, 5), InvalidArgument);
  CHECK(lemma_name(LemmaId::V) == "V");
}

TEST_CASE("finite estimates") {
  for (unsigned n : {4u, 10u, 60u, 3000u}) {
    CHECK(rc_finite_estimate(PlacementKind::AllInX, n / 2 + 2, n) == doctest::Approx(-1.0 / 3));
  }
  CHECK(rc_finite_estimate(PlacementKind::XXY, 30, 30) == doctest::Approx(0.2));
  CHECK(rc_finite_estimate(PlacementKind::XYX, 30, 30) == doctest::Approx(0.2));
  // n - m = 10 gives 1 - 2(1 + 2^-10)/(4 + 2^-10) for every m.
  const double t = std::ldexp(1.0, -10);
  CHECK(rc_finite_estimate(PlacementKind::XXY, 7, 17) == doctest::Approx(1 - 2 * (1 + t) / (4 + t)));
  CHECK(xxy_quoted_closed_form(10) == doctest::Approx(1 - 2 * (1 - t) / (4 + t)));
  CHECK(rc_finite_estimate(PlacementKind::XYX, 5000, 10000) == -INFINITY);
}

TEST_CASE("composed limits") {
  CHECK(composed_limit(PlacementKind::XYX, BetaClass::LessThanOne).diverges());
  CHECK(*composed_limit(PlacementKind::XXY, BetaClass::LessThanOne).value == mpq_class(1, 2));
  for (PlacementKind k : kAllPlacements) {
    CHECK(*composed_limit(k, BetaClass::EqualOne).value == rc_limit(k, BetaClass::EqualOne));
  }
}

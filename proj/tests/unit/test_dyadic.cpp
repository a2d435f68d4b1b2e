#include <doctest.h>

#include "bipcorr/dyadic.hpp"
#include "bipcorr/errors.hpp"

using namespace bipcorr;

TEST_CASE("canonical form") {
  CHECK(Dyadic(12, 5).to_string() == "3/2^3");
  CHECK(Dyadic(0, 9).to_string() == "0/2^0");
  CHECK(Dyadic(8, 3) == Dyadic::one());
  CHECK(Dyadic(-6, 2).to_string() == "-3/2^1");
}

TEST_CASE("parse round trip and errors") {
  for (const char* t : {"9/2^4", "0/2^0", "1/2^0", "-513/2^14"}) {
    CHECK(Dyadic::parse(t).to_string() == t);
  }
  CHECK_THROWS_AS(Dyadic::parse("9/16"), InvalidArgument);
  CHECK_THROWS_AS(Dyadic::parse("x/2^3"), InvalidArgument);
}

TEST_CASE("arithmetic is exact") {
  const Dyadic a(3, 2), b(1, 3);  // 3/4, 1/8
  CHECK((a + b).to_string() == "7/2^3");
  CHECK((a - b).to_string() == "5/2^3");
  CHECK((a * b).to_string() == "3/2^5");
  CHECK(a.scaled_down(3).to_string() == "3/2^5");
  CHECK((a * a - Dyadic(1, 1)).to_string() == "1/2^4");
  CHECK(b < a);
  CHECK(compare(a, a) == 0);
  CHECK(a.to_rational() == mpq_class(3, 4));
  CHECK(a.to_double() == doctest::Approx(0.75));
  CHECK(a.is_probability());
  CHECK_FALSE(Dyadic(5, 2).is_probability());
}

TEST_CASE("rationals") {
  CHECK(rational_string(mpq_class(-2, 16)) == "-1/8");
  CHECK(rational_string(mpq_class(1)) == "1/1");
  CHECK(parse_rational("2/6") == mpq_class(1, 3));
  CHECK(parse_rational("1") == 1);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidArgument);
  CHECK(sign_name(sign_of(-3)) == "negative");
  CHECK(verdict_name(SignVerdict::Inconclusive) == "inconclusive");
}

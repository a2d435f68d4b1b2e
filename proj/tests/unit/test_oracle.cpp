#include <doctest.h>

#include "bipcorr/errors.hpp"
#include "bipcorr/oracle.hpp"

using namespace bipcorr;

namespace {

AvoidanceEvent atom(const GraphShape& s, Vertex u, Vertex v) { return AvoidanceEvent(s, {{u, v}}); }

}  // namespace

TEST_CASE("single pairs on small shapes") {
  const GraphShape k22(2, 2), k21(2, 1);
  CHECK(exact_prob(k22, atom(k22, x_vertex(1), x_vertex(0))).to_string() == "9/2^4");
  CHECK(exact_prob(k22, atom(k22, y_vertex(0), x_vertex(0))).to_string() == "7/2^4");
  CHECK(exact_prob(k21, atom(k21, x_vertex(1), x_vertex(0))).to_string() == "3/2^2");
  const GraphShape k11(1, 1);
  CHECK(exact_prob(k11, atom(k11, x_vertex(0), y_vertex(0))).to_string() == "1/2^1");
}

TEST_CASE("relative covariance examples") {
  const ExactRcResult k31 = exact_rc(GraphShape(3, 1), PlacementKind::AllInX);
  CHECK(k31.p_joint == mpq_class(1, 2));
  CHECK(k31.p_ac == mpq_class(3, 4));
  CHECK(k31.p_bc == mpq_class(3, 4));
  CHECK(*k31.rc == mpq_class(-1, 8));
  CHECK(k31.sign == Sign::Negative);
  CHECK(k31.dyadic_covariance->to_string() == "-1/2^4");

  CHECK(*exact_rc(GraphShape(2, 2), PlacementKind::XXY).rc == mpq_class(-5, 16));
  CHECK(*exact_rc(GraphShape(2, 2), PlacementKind::XYX).rc == mpq_class(-1, 48));
  CHECK_THROWS_AS(exact_rc(GraphShape(2, 2), PlacementKind::AllInX), InvalidArgument);
}

TEST_CASE("biased edges") {
  const GraphShape k22(2, 2);
  const ExactRcResult xxy = exact_rc(k22, PlacementKind::XXY, mpq_class(1));
  // Every edge points X -> Y, so X1 -> Y0 directly and the joint event is null.
  CHECK(xxy.p_bc == 0);
  CHECK(xxy.p_joint == 0);
  CHECK_FALSE(xxy.rc.has_value());
  CHECK_FALSE(xxy.dyadic_ac.has_value());
  const ExactRcResult allx = exact_rc(GraphShape(3, 2), PlacementKind::AllInX, mpq_class(1));
  CHECK(allx.p_joint == 1);
  CHECK(allx.rc.has_value());
  // p = 1/2 through the biased path agrees with the dyadic path.
  const AvoidanceEvent e = atom(k22, x_vertex(1), y_vertex(1));
  CHECK(exact_prob_biased(k22, e, mpq_class(1, 2)) == exact_prob(k22, e).to_rational());
  CHECK(exact_prob_biased(k22, atom(k22, x_vertex(0), y_vertex(0)), mpq_class(1)) == 0);
  CHECK_THROWS_AS(exact_prob_biased(k22, e, mpq_class(3, 2)), InvalidArgument);
}

TEST_CASE("chunking and worker count do not change tallies") {
  const GraphShape s(3, 4);
  const PlacementEvents pe = placement_events(s, PlacementKind::AllInX);
  const std::vector<AvoidanceEvent> events{pe.not_a, pe.not_b, pe.joint};
  EnumerationOptions base;
  base.threads = 1;
  base.chunk_size = 4096;
  const auto reference = tally_events(s, events, base);
  for (unsigned threads : {1u, 2u, 5u}) {
    for (std::uint64_t chunk : {1ull, 7ull, 100ull, 1ull << 20}) {
      EnumerationOptions o;
      o.threads = threads;
      o.chunk_size = chunk;
      const auto t = tally_events(s, events, o);
      for (std::size_t k = 0; k < events.size(); ++k) {
        CHECK(std::vector<std::uint64_t>(t[k].by_flag_count().begin(), t[k].by_flag_count().end()) ==
              std::vector<std::uint64_t>(reference[k].by_flag_count().begin(),
                                         reference[k].by_flag_count().end()));
      }
    }
  }
}

TEST_CASE("complement identity through the kernel predicate") {
  const GraphShape s(3, 3);
  const std::uint64_t reach = count_orientations(s, [](const kernel::CompactOrientation& o) {
    return ((o.forward(x_vertex(0)).y >> 1) & 1) != 0;  // X0 reaches Y1
  });
  const DyadicProb avoid = exact_prob(s, atom(s, x_vertex(0), y_vertex(1)));
  CHECK(avoid + Dyadic(reach, 9) == Dyadic::one());
}

TEST_CASE("joint probability is positive on every small shape") {
  for (unsigned m = 1; m <= 4; ++m) {
    for (unsigned n = 1; m * n <= 12; ++n) {
      for (PlacementKind k : kAllPlacements) {
        if (!placement_fits(GraphShape(m, n), k)) continue;
        CHECK(exact_rc(GraphShape(m, n), k).p_joint > 0);
      }
    }
  }
}

TEST_CASE("enumeration cap") {
  const GraphShape s(5, 5);
  CHECK_THROWS_AS(exact_rc(s, PlacementKind::XXY), BudgetExceeded);
  EnumerationOptions o;
  o.max_mn = 31;
  CHECK_THROWS_AS(check_enumeration_cap(GraphShape(2, 2), o), InvalidArgument);
  o.max_mn = 30;
  CHECK_NOTHROW(check_enumeration_cap(GraphShape(5, 6), o));
}

#include <doctest.h>

#include <algorithm>

#include "bipcorr/errors.hpp"
#include "bipcorr/model.hpp"

using namespace bipcorr;

namespace {

Orientation all_out(unsigned m, unsigned n) {
  return Orientation(GraphShape(m, n), std::vector<bool>(std::size_t{m} * n, true));
}

std::vector<Vertex> all_vertices(const GraphShape& s) {
  std::vector<Vertex> v;
  for (unsigned i = 0; i < s.m(); ++i) v.push_back(x_vertex(i));
  for (unsigned j = 0; j < s.n(); ++j) v.push_back(y_vertex(j));
  return v;
}

}  // namespace

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(GraphShape(0, 3), InvalidArgument);
  CHECK_THROWS_AS(GraphShape(2, 0), InvalidArgument);
  CHECK(GraphShape(3, 4).edge_count() == 12);
  CHECK(GraphShape(3, 4).transposed() == GraphShape(4, 3));
}

TEST_CASE("flag convention is row-major with bit i*n+j") {
  const GraphShape s(2, 3);
  const Orientation o = orientation_from_index(s, 0b100010);  // bits 1 and 5
  CHECK(o.flag(0, 1));
  CHECK(o.flag(1, 2));
  CHECK_FALSE(o.flag(0, 0));
  CHECK_FALSE(o.flag(1, 0));
  CHECK_THROWS_AS(Orientation(s, std::vector<bool>(5)), InvalidArgument);
}

TEST_CASE("neighbourhoods of the all-outward orientation") {
  const Orientation o = all_out(2, 2);
  CHECK(neighborhood(o, x_vertex(0), Direction::Out) ==
        std::vector<Vertex>{y_vertex(0), y_vertex(1)});
  CHECK(neighborhood(o, x_vertex(0), Direction::In).empty());
  const Orientation single(GraphShape(1, 1), {true});
  CHECK(neighborhood(single, y_vertex(0), Direction::In) == std::vector<Vertex>{x_vertex(0)});
}

TEST_CASE("reachability basics") {
  const Orientation o = all_out(2, 2);
  CHECK(reaches(o, x_vertex(0), y_vertex(1)));
  CHECK_FALSE(reaches(o, x_vertex(0), x_vertex(1)));
  CHECK_FALSE(reaches(o, y_vertex(0), x_vertex(0)));
  CHECK(reaches(o, x_vertex(1), x_vertex(1)));

  // X0 -> Y0 -> X1 -> Y1, Y1 -> X0 would close a cycle.
  const Orientation cyc(GraphShape(2, 2), {true, false, false, true});
  CHECK(reaches(cyc, x_vertex(0), x_vertex(1)));
  CHECK(reaches(cyc, x_vertex(1), x_vertex(0)));
  CHECK_THROWS_AS(reaches(cyc, x_vertex(2), x_vertex(0)), InvalidArgument);
}

TEST_CASE("bijection: index round trip is exact") {
  for (const GraphShape s : {GraphShape(1, 1), GraphShape(2, 3), GraphShape(3, 3)}) {
    const std::uint64_t total = std::uint64_t{1} << s.edge_count();
    for (std::uint64_t i = 0; i < total; ++i) {
      REQUIRE(orientation_index(orientation_from_index(s, i)) == i);
    }
  }
  CHECK_THROWS_AS(orientation_from_index(GraphShape(8, 8), 0), InvalidArgument);
  CHECK_THROWS_AS(orientation_from_index(GraphShape(2, 2), 16), InvalidArgument);
}

TEST_CASE("property: partition of the opposite class") {
  const GraphShape s(3, 3);
  for (std::uint64_t i = 0; i < 512; i += 7) {
    const Orientation o = orientation_from_index(s, i);
    for (const Vertex& v : all_vertices(s)) {
      std::vector<Vertex> out = neighborhood(o, v, Direction::Out);
      std::vector<Vertex> in = neighborhood(o, v, Direction::In);
      std::vector<Vertex> both;
      std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(both));
      CHECK(both.size() == out.size() + in.size());
      CHECK(both.size() == s.side_size(v.side == Side::X ? Side::Y : Side::X));
    }
  }
}

TEST_CASE("property: reversal is exhaustive on K_{3,3}") {
  const GraphShape s(3, 3);
  const auto vs = all_vertices(s);
  for (std::uint64_t i = 0; i < 512; ++i) {
    const Orientation o = orientation_from_index(s, i);
    const Orientation r = reverse(o);
    CHECK(reverse(r) == o);
    for (const Vertex& u : vs) {
      for (const Vertex& v : vs) REQUIRE(reaches(r, u, v) == reaches(o, v, u));
    }
  }
}

TEST_CASE("property: adding an atom shrinks an event") {
  const GraphShape s(2, 3);
  const AvoidanceEvent one(s, {{x_vertex(0), x_vertex(1)}});
  const AvoidanceEvent two = one.with_atom(s, {y_vertex(2), x_vertex(0)});
  for (std::uint64_t i = 0; i < 64; ++i) {
    const Orientation o = orientation_from_index(s, i);
    if (event_holds(o, two)) CHECK(event_holds(o, one));
  }
}

TEST_CASE("event validation") {
  const GraphShape s(2, 2);
  CHECK_THROWS_AS(AvoidanceEvent(s, {}), InvalidArgument);
  CHECK_THROWS_AS(AvoidanceEvent(s, {{x_vertex(0), x_vertex(0)}}), InvalidArgument);
  CHECK_THROWS_AS(AvoidanceEvent(s, {{x_vertex(0), y_vertex(2)}}), InvalidArgument);
  CHECK_THROWS_AS(AvoidanceEvent(s, {{x_vertex(0), y_vertex(1)}, {x_vertex(0), y_vertex(1)}}),
                  InvalidArgument);
  CHECK(AvoidanceEvent(s, {{x_vertex(1), x_vertex(0)}}).to_string() == "{X1-/->X0}");
}

TEST_CASE("placements") {
  CHECK(placement_fits(GraphShape(3, 1), PlacementKind::AllInX));
  CHECK_FALSE(placement_fits(GraphShape(2, 5), PlacementKind::AllInX));
  CHECK(placement_fits(GraphShape(2, 1), PlacementKind::XXY));
  CHECK(placement_fits(GraphShape(2, 1), PlacementKind::XYX));
  CHECK_FALSE(placement_fits(GraphShape(1, 4), PlacementKind::XYX));
  const Placement p = canonical_placement(PlacementKind::XYX);
  CHECK(p.x == x_vertex(0));
  CHECK(p.y == y_vertex(0));
  CHECK(p.z == x_vertex(1));
  for (PlacementKind k : kAllPlacements) CHECK(parse_placement(placement_name(k)) == k);
  CHECK_FALSE(parse_placement("xx").has_value());
  const PlacementEvents ev = placement_events(GraphShape(2, 2), PlacementKind::XXY);
  CHECK(ev.joint.atoms().size() == 2);
  CHECK_THROWS_AS(placement_events(GraphShape(2, 2), PlacementKind::AllInX), InvalidArgument);
}

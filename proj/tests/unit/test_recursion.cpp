#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "bipcorr/errors.hpp"
#include "bipcorr/oracle.hpp"
#include "bipcorr/recursion.hpp"

using namespace bipcorr;

namespace {

std::string exact_value(RecursionEngine& e, Family f, unsigned m, unsigned n, unsigned s) {
  return e.eval({f, m, n, s}).exact->to_string();
}

std::vector<MemoKey> keys_up_to(unsigned max_mn) {
  std::vector<MemoKey> out;
  for (unsigned m = 1; m <= max_mn; ++m) {
    for (unsigned n = 1; m * n <= max_mn; ++n) {
      for (Family f : kAllFamilies) {
        const auto hi = max_size(f, m, n);
        if (!hi) continue;
        for (unsigned s = 0; s <= *hi; ++s) out.push_back({f, m, n, s});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("names and bounds") {
  for (Family f : kAllFamilies) CHECK(parse_family(family_name(f)) == f);
  CHECK(parse_mode("printed") == Mode::AsPrinted);
  CHECK(parse_backend("bigfloat") == Backend::BigFloat);
  CHECK(max_size(Family::FX, 3, 2) == 2u);
  CHECK(max_size(Family::GX, 3, 2) == 1u);
  CHECK(max_size(Family::HY, 3, 2) == 1u);
  CHECK_FALSE(max_size(Family::GY, 1, 4).has_value());
  CHECK_FALSE(in_bounds({Family::FX, 2, 2, 2}));
  CHECK(to_string(MemoKey{Family::FY, 3, 2, 1}) == "FY(3,2,1)");
  RecursionEngine e(Mode::Validated, Backend::ExactDyadic);
  CHECK_THROWS_AS(e.eval({Family::FX, 2, 2, 2}), InvalidArgument);
}

TEST_CASE("defining events") {
  const auto gx = defining_event({Family::GX, 4, 2, 2});
  REQUIRE(gx.has_value());
  CHECK(gx->to_string() == "{X2-/->X1, X3-/->X1, X1-/->X0}");
  CHECK(defining_event({Family::HY, 2, 3, 1})->to_string() == "{Y1-/->Y0, Y0-/->X0}");
  CHECK_FALSE(defining_event({Family::FY, 2, 3, 0}).has_value());
  CHECK(triple_event({Family::GX, 4, 2, 1})->atoms().size() == 3);
  CHECK_FALSE(triple_event({Family::FX, 4, 2, 1}).has_value());
}

TEST_CASE("printed and validated systems on the known discrepancies") {
  RecursionEngine v(Mode::Validated, Backend::ExactDyadic);
  RecursionEngine p(Mode::AsPrinted, Backend::ExactDyadic);
  CHECK(exact_value(v, Family::FY, 3, 2, 1) == "25/2^6");
  CHECK(exact_value(p, Family::FY, 3, 2, 1) == "23/2^7");
  CHECK(exact_value(v, Family::HY, 2, 3, 2) == "5/2^6");
  CHECK(exact_value(p, Family::HY, 2, 3, 2) == "1/2^2");
  CHECK(v.printed_step_over_validated({Family::FX, 3, 2, 1}) == *v.eval({Family::FX, 3, 2, 1}).exact);
}

TEST_CASE("pair and joint probabilities") {
  RecursionEngine e(Mode::Validated, Backend::ExactDyadic);
  CHECK(single_pair_prob(e, 2, 2, PairKind::XtoX).exact->to_string() == "9/2^4");
  CHECK(single_pair_prob(e, 2, 2, PairKind::YtoX).exact->to_string() == "7/2^4");
  CHECK(single_pair_prob(e, 2, 1, PairKind::XtoX).exact->to_string() == "3/2^2");
  CHECK(joint_prob(e, 3, 1, PlacementKind::AllInX).exact->to_string() == "1/2^1");
  const GraphShape k22(2, 2);
  for (PlacementKind k : {PlacementKind::XXY, PlacementKind::XYX}) {
    CHECK(*joint_prob(e, 2, 2, k).exact == exact_prob(k22, placement_events(k22, k).joint));
  }
}

TEST_CASE("base-case identities in both modes") {
  for (Mode mode : {Mode::AsPrinted, Mode::Validated}) {
    RecursionEngine e(mode, Backend::ExactDyadic);
    for (unsigned m = 2; m <= 5; ++m) {
      for (unsigned n = 1; n <= 5; ++n) {
        CHECK(*e.eval({Family::GX, m, n, 0}).exact == *e.eval({Family::FX, m, n, 1}).exact);
        CHECK(*e.eval({Family::GY, m, n, 0}).exact == *e.eval({Family::FX, m, n, 1}).exact);
        CHECK(*e.eval({Family::HX, m, n, 0}).exact == *e.eval({Family::FY, m, n, 1}).exact);
        CHECK(*e.eval({Family::HY, m, n, 0}).exact == *e.eval({Family::FY, m, n, 1}).exact);
      }
    }
  }
}

TEST_CASE("validated system equals enumeration on every key with m*n <= 10") {
  RecursionEngine e(Mode::Validated, Backend::ExactDyadic);
  for (const MemoKey& key : keys_up_to(10)) {
    const Dyadic got = *e.eval(key).exact;
    const auto event = defining_event(key);
    const Dyadic want = event ? exact_prob(GraphShape(key.m, key.n), *event) : Dyadic::one();
    INFO(to_string(key));
    CHECK(got == want);
    CHECK(got.is_probability());
    CHECK(got.exponent() <= std::uint64_t{key.m} * key.n);
  }
}

TEST_CASE("both modes reproduce the golden values") {
  std::ifstream in(BIPCORR_GOLDEN_DIR "/recursion_values.csv");
  REQUIRE(in);
  RecursionEngine printed(Mode::AsPrinted, Backend::ExactDyadic);
  RecursionEngine validated(Mode::Validated, Backend::ExactDyadic);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::stringstream s(line);
    std::string fam, mode, m, n, size, value;
    std::getline(s, fam, ',');
    std::getline(s, mode, ',');
    std::getline(s, m, ',');
    std::getline(s, n, ',');
    std::getline(s, size, ',');
    std::getline(s, value, ',');
    RecursionEngine& e = mode == "printed" ? printed : validated;
    const MemoKey key{*parse_family(fam), static_cast<unsigned>(std::stoul(m)),
                      static_cast<unsigned>(std::stoul(n)), static_cast<unsigned>(std::stoul(size))};
    INFO(line);
    CHECK(e.eval(key).exact->to_string() == value);
    ++rows;
  }
  CHECK(rows == 3740);
}

TEST_CASE("backend agreement: bigfloat intervals contain the exact values") {
  RecursionEngine exact(Mode::Validated, Backend::ExactDyadic);
  for (const MemoKey& key : keys_up_to(20)) {
    RecursionEngine fl(Mode::Validated, Backend::BigFloat);
    const RecurValue v = fl.eval(key);
    INFO(to_string(key));
    REQUIRE(v.approx.has_value());
    CHECK(v.approx->contains(*exact.eval(key).exact));
  }
  RecursionEngine fl(Mode::Validated, Backend::BigFloat);
  const MemoKey big{Family::GY, 24, 24, 1};
  CHECK(fl.eval(big).approx->contains(*exact.eval(big).exact));
  CHECK(fl.precision() >= 96);
}

TEST_CASE("memoization is deterministic and engines are independent across threads") {
  const MemoKey key{Family::HX, 12, 12, 1};
  RecursionEngine a(Mode::Validated, Backend::ExactDyadic);
  const Dyadic first = *a.eval(key).exact;
  const std::size_t states = a.memo_size();
  CHECK(states > 0);
  CHECK(*a.eval(key).exact == first);
  CHECK(a.memo_size() == states);

  std::vector<Dyadic> results(4);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < results.size(); ++t) {
      pool.emplace_back([&results, t, key] {
        RecursionEngine e(Mode::Validated, Backend::ExactDyadic);
        results[t] = *e.eval(key).exact;
      });
    }
  }
  for (const Dyadic& r : results) CHECK(r == first);
}

TEST_CASE("budget, precision and fault options") {
  EngineOptions tight;
  tight.state_budget = 100;
  RecursionEngine e(Mode::Validated, Backend::ExactDyadic, tight);
  CHECK_THROWS_AS(e.eval({Family::GY, 30, 30, 1}), BudgetExceeded);
  CHECK(estimated_states({Family::GY, 30, 30, 1}) > 100);

  EngineOptions strict;
  strict.mantissa_bits = 64;
  strict.max_relative_error = 1e-300;
  RecursionEngine f(Mode::Validated, Backend::BigFloat, strict);
  CHECK_THROWS_AS(f.eval({Family::GX, 40, 40, 1}), PrecisionFailure);

  EngineOptions faulty;
  faulty.fault = Fault::NegateGY;
  RecursionEngine bad(Mode::Validated, Backend::ExactDyadic, faulty);
  RecursionEngine good(Mode::Validated, Backend::ExactDyadic);
  CHECK(*bad.eval({Family::GY, 2, 2, 1}).exact == -*good.eval({Family::GY, 2, 2, 1}).exact);
}

TEST_CASE("rc from the recursion") {
  const RcRecursionResult k31 = rc_recursion(3, 1, PlacementKind::AllInX, Backend::ExactDyadic);
  CHECK(*k31.exact->rc == mpq_class(-1, 8));
  CHECK(*rc_recursion(2, 2, PlacementKind::XXY, Backend::ExactDyadic).exact->rc == mpq_class(-5, 16));
  CHECK(*rc_recursion(2, 2, PlacementKind::XYX, Backend::ExactDyadic).exact->rc == mpq_class(-1, 48));

  const RcRecursionResult fl = rc_recursion(24, 24, PlacementKind::XXY, Backend::BigFloat);
  const RcRecursionResult ex = rc_recursion(24, 24, PlacementKind::XXY, Backend::ExactDyadic);
  REQUIRE(fl.approx.has_value());
  CHECK(fl.approx->sign == SignVerdict::Positive);
  CHECK(fl.approx->rc.midpoint() == doctest::Approx(ex.exact->rc->get_d()).epsilon(1e-12));
  CHECK(fl.approx->p_joint.contains(*ex.exact->dyadic_joint));

  RecursionEngine printed(Mode::AsPrinted, Backend::ExactDyadic);
  CHECK_THROWS_AS(rc_recursion(printed, 3, 3, PlacementKind::XXY), InvalidArgument);
  CHECK_THROWS_AS(rc_recursion(2, 3, PlacementKind::AllInX, Backend::ExactDyadic), InvalidArgument);
}

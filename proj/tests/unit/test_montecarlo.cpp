#include <doctest.h>

#include <cmath>

#include "bipcorr/montecarlo.hpp"
#include "bipcorr/oracle.hpp"
#include "bipcorr/philox.hpp"

using namespace bipcorr;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using P = Philox4x32;
  CHECK(P::generate({0, 0, 0, 0}, {0, 0}) ==
        P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("trial streams depend only on (seed, batch, trial)") {
  TrialStream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12), d(8, 3, 11);
  const std::uint64_t a0 = a.next();
  CHECK(a0 == b.next());
  CHECK(a0 != c.next());
  CHECK(a0 != d.next());
  CHECK(a.next() == b.next());
}

TEST_CASE("Wilson interval") {
  const Estimate e = wilson_estimate(50, 100);
  CHECK(e.mean == doctest::Approx(0.5));
  CHECK(e.ci_low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(e.ci_high == doctest::Approx(0.5962).epsilon(1e-3));
  const Estimate z = wilson_estimate(0, 1000);
  CHECK(z.ci_low == 0);
  CHECK(z.ci_high > 0);
}

TEST_CASE("event estimate is within 4 stderr and deterministic") {
  const GraphShape k22(2, 2);
  const AvoidanceEvent e(k22, {{x_vertex(1), x_vertex(0)}});
  McConfig cfg;
  cfg.seed = 99;
  const Estimate a = mc_estimate_event(k22, e, cfg);
  CHECK(std::fabs(a.mean - 9.0 / 16) <= 4 * a.std_error);
  CHECK(a.std_error == doctest::Approx(1.6e-3).epsilon(0.1));
  const Estimate b = mc_estimate_event(k22, e, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.ci_low == b.ci_low);
}

TEST_CASE("forced edges under p = 1 and p = 0") {
  const GraphShape s(3, 2);
  const AvoidanceEvent e(s, {{x_vertex(0), y_vertex(0)}});
  McConfig cfg;
  cfg.trials = 5000;
  cfg.p = 1;
  CHECK(mc_estimate_event(s, e, cfg).mean == 0);
  cfg.p = 0;
  CHECK(mc_estimate_event(s, e, cfg).mean == 1);
}

TEST_CASE("biased sampling matches the exact biased probability") {
  const GraphShape s(2, 3);
  const AvoidanceEvent e(s, {{y_vertex(0), x_vertex(1)}});
  McConfig cfg;
  cfg.p = mpq_class(1, 3);
  cfg.seed = 5;
  const Estimate est = mc_estimate_event(s, e, cfg);
  CHECK(std::fabs(est.mean - exact_prob_biased(s, e, cfg.p).get_d()) <= 4 * est.std_error);
}

TEST_CASE("determinism across worker counts") {
  const GraphShape s(4, 4);
  McConfig cfg;
  cfg.trials = 50'000;
  cfg.batch_size = 1000;
  cfg.seed = 3;
  cfg.workers = 1;
  const RcEstimate one = mc_estimate_rc(s, PlacementKind::XXY, cfg);
  for (unsigned w : {2u, 3u, 8u}) {
    cfg.workers = w;
    const RcEstimate r = mc_estimate_rc(s, PlacementKind::XXY, cfg);
    CHECK(r.p_joint.mean == one.p_joint.mean);
    CHECK(r.covariance.mean == one.covariance.mean);
    CHECK(r.covariance.std_error == one.covariance.std_error);
    CHECK(r.rc == one.rc);
  }
  CHECK(one.covariance.method == CiMethod::BatchMeans);
  CHECK_FALSE(one.covariance.fallback);
}

TEST_CASE("common random numbers keep the joint below each marginal") {
  McConfig cfg;
  cfg.trials = 20'000;
  for (PlacementKind k : kAllPlacements) {
    const RcEstimate r = mc_estimate_rc(GraphShape(3, 3), k, cfg);
    CHECK(r.p_joint.mean <= std::min(r.p_ac.mean, r.p_bc.mean));
  }
}

TEST_CASE("few batches fall back to a binomial interval") {
  McConfig cfg;
  cfg.trials = 1000;
  cfg.batch_size = 500;
  const RcEstimate r = mc_estimate_rc(GraphShape(3, 1), PlacementKind::AllInX, cfg);
  CHECK(r.covariance.method == CiMethod::Binomial);
  CHECK(r.covariance.fallback);
}

TEST_CASE("K_{3,1} all-x covariance is negative") {
  McConfig cfg;
  cfg.seed = 1;
  const RcEstimate r = mc_estimate_rc(GraphShape(3, 1), PlacementKind::AllInX, cfg);
  CHECK(r.sign == SignVerdict::Negative);
  CHECK(*r.rc == doctest::Approx(-0.125).epsilon(0.1));
}

TEST_CASE("no joint hits leaves rc undefined and the sign inconclusive") {
  McConfig cfg;
  cfg.trials = 2000;
  const RcEstimate r = mc_estimate_rc(GraphShape(12, 12), PlacementKind::XXY, cfg);
  CHECK(r.p_joint.mean == 0);
  CHECK_FALSE(r.rc.has_value());
  CHECK(r.sign == SignVerdict::Inconclusive);
}

TEST_CASE("reflected draws at 1 - p reproduce the reversed event stream") {
  const GraphShape s(2, 3);
  const AvoidanceEvent fwd(s, {{x_vertex(0), y_vertex(2)}});
  const AvoidanceEvent rev(s, {{y_vertex(2), x_vertex(0)}});
  for (const mpq_class& p : {mpq_class(1, 2), mpq_class(1, 3), mpq_class(4, 5)}) {
    McConfig a;
    a.trials = 3000;
    a.batch_size = 256;
    a.seed = 17;
    a.p = p;
    McConfig b = a;
    b.p = 1 - p;
    b.reflect_draws = true;
    CHECK(mc_indicator_stream(s, fwd, a) == mc_indicator_stream(s, rev, b));
    CHECK(sample_orientation(s, b, 2, 9) == reverse(sample_orientation(s, a, 2, 9)));
  }
}

TEST_CASE("feasibility advice") {
  const FeasibilityAdvice k88 = feasibility(GraphShape(8, 8), PlacementKind::AllInX, 0.1);
  CHECK(k88.feasible);
  CHECK(k88.trials_needed == doctest::Approx(2.18e6).epsilon(0.01));
  const FeasibilityAdvice k416 = feasibility(GraphShape(4, 16), PlacementKind::AllInX, 0.1);
  CHECK_FALSE(k416.feasible);
  CHECK(k416.trials_needed == doctest::Approx(1.43e11).epsilon(0.01));
  CHECK(k416.summary.find("infeasible") != std::string::npos);
}

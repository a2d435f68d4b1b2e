#include <doctest.h>

#include <cmath>

#include "bipcorr/atlas.hpp"

using namespace bipcorr;

TEST_CASE("csv rows") {
  const AtlasRow r = oracle_row(3, 1, PlacementKind::AllInX);
  CHECK(csv_line(r).rfind("3,1,all-x,oracle,1/2,3/2^2,3/2^2,1/2^1,-1/2^4,-1/8,,,,negative,,,", 0) == 0);
  CHECK(rows_csv({r}).rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(rows_json({r}).find("\"schema_version\": 1") != std::string::npos);

  const AtlasRow s = skipped_row(5, 5, "xxy", "oracle: too big, really");
  CHECK(csv_line(s).find("\"oracle: too big, really\"") != std::string::npos);
  CHECK(method_name(s.method) == "skipped");
  CHECK(parse_method("mc") == Method::MC);
  CHECK_FALSE(parse_method("skipped").has_value());
}

TEST_CASE("row kinds") {
  const AtlasRow rec = recursion_row(3, 1, PlacementKind::AllInX, Backend::ExactDyadic);
  CHECK(rec.rc == "-1/8");
  CHECK(rec.std_error.empty());
  const AtlasRow fl = recursion_row(20, 20, PlacementKind::XXY, Backend::BigFloat);
  CHECK(fl.sign == "positive");
  CHECK_FALSE(fl.std_error.empty());
  McConfig cfg;
  cfg.trials = 10'000;
  const AtlasRow mc = mc_row(3, 1, PlacementKind::AllInX, cfg);
  CHECK(mc.trials == 10'000u);
  CHECK(mc.seed == 0u);
  CHECK_FALSE(mc.ci_low.empty());
  const AtlasRow as = asymptotic_row(9, 9, PlacementKind::AllInX);
  CHECK(*as.rc_value == doctest::Approx(-1.0 / 3));
  CHECK(auto_backend(16, 16) == Backend::ExactDyadic);
  CHECK(auto_backend(17, 16) == Backend::BigFloat);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("sweeps never drop cells") {
  SweepSpec spec;
  spec.pairs = {{1, 4}, {2, 2}, {5, 5}, {4, 16}};
  spec.methods = {Method::Oracle, Method::Recursion, Method::MC};
  spec.mc.trials = 2000;
  const SweepResult r = run_sweep(spec);
  CHECK(r.rows.size() == 4 * 3 * 3);
  std::size_t skipped = 0;
  for (const AtlasRow& row : r.rows) {
    if (row.method == Method::Skipped) {
      ++skipped;
      CHECK_FALSE(row.sign.empty());
    }
  }
  CHECK(skipped > 0);
  CHECK(r.rows[0].method == Method::Skipped);  // K_{1,4} is below the m, n >= 2 minimum
  CHECK(r.convergence.empty());
}

TEST_CASE("beta sweeps carry convergence diagnostics") {
  SweepSpec spec;
  spec.beta = mpq_class(1);
  spec.beta_n = {8, 12, 16, 20};
  spec.placements = {PlacementKind::XXY};
  const SweepResult r = run_sweep(spec);
  REQUIRE(r.convergence.size() == 1);
  const ConvergenceCell& c = r.convergence[0];
  CHECK_FALSE(c.flagged);
  CHECK(c.exact_rc.size() == 4);
  CHECK(std::fabs(*c.exact_rc.back() - 0.2) < std::fabs(*c.exact_rc.front() - 0.2));

  spec.beta = mpq_class(1, 2);
  spec.beta_n = {8, 12, 16};
  spec.placements = {PlacementKind::XYX};
  const SweepResult half = run_sweep(spec);
  CHECK(half.convergence[0].flagged);
  CHECK(convergence_text(half.convergence).find("FLAG") != std::string::npos);
  CHECK(sweep_json(half).find("\"flagged\": true") != std::string::npos);
}

TEST_CASE("q2 probe at m = 2") {
  Q2Options q;
  q.m_min = 2;
  q.m_max = 2;
  const Q2Result r = q2_probe(q);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].method == Method::Skipped);
  CHECK(r.rows[1].method == Method::Oracle);
  CHECK(r.rows[1].rc == "-513/3712");
  CHECK(r.rows[2].rc == r.rows[1].rc);
  REQUIRE(r.agreements.size() == 1);
  CHECK(r.agreements[0].equal);
}

TEST_CASE("property checks on a small shape") {
  const GraphShape s(2, 3);
  CHECK(check_complement(s).empty());
  CHECK(check_reversal(s, mpq_class(1, 2)).empty());
  CHECK(check_reversal(s, mpq_class(2, 7)).empty());
  CHECK(check_relabeling(s).empty());
  CHECK(check_mcdiarmid(s).empty());
  CHECK(check_forced_third_avoidance(GraphShape(3, 3)).empty());
}

TEST_CASE("verify passes and catches an injected fault") {
  VerifyOptions o;
  o.max_mn = 8;
  o.property_max_mn = 6;
  o.trials = 5000;
  const VerifyReport good = cmd_verify(o);
  CHECK(good.ok());
  CHECK(verify_text(good).find("verify: all checks passed") != std::string::npos);
  CHECK(verify_json(good).find("\"ok\": true") != std::string::npos);

  o.recursion.fault = Fault::NegateGY;
  const VerifyReport bad = cmd_verify(o);
  CHECK_FALSE(bad.ok());
  CHECK(bad.failures() == 1);
  CHECK(bad.checks[0].detail.find("xxy") != std::string::npos);
}

// bipcorr: exact, recursive, sampled and asymptotic reachability correlations
// in random orientations of K_{m,n}.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 budget, feasibility or precision refusal.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bipcorr/acceptance.hpp"
#include "bipcorr/atlas.hpp"
#include "bipcorr/erratum.hpp"
#include "bipcorr/errors.hpp"

using namespace bipcorr;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefused = 3;

struct Common {
  unsigned m = 0, n = 0;
  std::string placement;
  std::string event;
  std::string p = "1/2";
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  unsigned max_mn = kDefaultEnumerationCap;
};

void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "Write output to PATH instead of stdout");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw InvalidArgument("cannot write " + c.out);
  f << text;
}

std::string render(const Common& c, const std::vector<AtlasRow>& rows) {
  return c.format == "json" ? rows_json(rows) : rows_csv(rows);
}

PlacementKind placement_of(const Common& c) {
  auto p = parse_placement(c.placement);
  if (!p) throw InvalidArgument("unknown placement '" + c.placement + "' (all-x, xxy, xyx)");
  return *p;
}

Vertex parse_vertex(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'X' && s[0] != 'Y')) {
    throw InvalidArgument("bad vertex '" + s + "' (expected X<i> or Y<j>)");
  }
  std::size_t used = 0;
  unsigned long idx = 0;
  try {
    idx = std::stoul(s.substr(1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() - 1) throw InvalidArgument("bad vertex '" + s + "'");
  return s[0] == 'X' ? x_vertex(static_cast<unsigned>(idx)) : y_vertex(static_cast<unsigned>(idx));
}

/// "X1-X0,Y0-X1" is {X1 -/-> X0} and {Y0 -/-> X1}.
AvoidanceEvent parse_event(const GraphShape& shape, const std::string& text) {
  std::vector<Atom> atoms;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw InvalidArgument("bad atom '" + item + "' (expected U-V)");
    atoms.push_back({parse_vertex(item.substr(0, dash)), parse_vertex(item.substr(dash + 1))});
  }
  return AvoidanceEvent(shape, atoms);
}

void require_target(const Common& c) {
  if (c.placement.empty() == c.event.empty()) {
    throw InvalidArgument("give exactly one of --placement or --event");
  }
}

std::vector<unsigned> parse_list(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(static_cast<unsigned>(std::stoul(item)));
      } else {
        const unsigned lo = static_cast<unsigned>(std::stoul(item.substr(0, dots)));
        const unsigned hi = static_cast<unsigned>(std::stoul(item.substr(dots + 2)));
        for (unsigned v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad list item '" + item + "'");
    }
  }
  return out;
}

EnumerationOptions enumeration(const Common& c) {
  EnumerationOptions e;
  e.max_mn = c.max_mn;
  e.threads = c.threads;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachability correlations in random orientations of K_{m,n}"};
  app.require_subcommand(1);
  Common c;

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact values by enumerating every orientation");
  oracle->add_option("--m", c.m, "Size of X")->required();
  oracle->add_option("--n", c.n, "Size of Y")->required();
  oracle->add_option("--placement", c.placement, "all-x, xxy or xyx");
  oracle->add_option("--event", c.event, "Avoidance atoms, e.g. X1-X0,Y0-X1");
  oracle->add_option("--p", c.p, "Probability an edge points X -> Y, as NUM/DEN");
  oracle->add_option("--max-mn", c.max_mn, "Enumeration cap on m*n");
  oracle->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  add_format(oracle, c);

  // recur
  std::string mode = "validated", backend, family;
  unsigned size = 1, mantissa = 0;
  std::uint64_t state_budget = EngineOptions{}.state_budget;
  std::string fault;
  auto* recur = app.add_subcommand("recur", "Peeling recursion for family keys or rc");
  recur->add_option("--m", c.m)->required();
  recur->add_option("--n", c.n)->required();
  recur->add_option("--placement", c.placement, "rc for a placement (validated mode)");
  recur->add_option("--family", family, "FX, FY, GX, GY, HX or HY");
  recur->add_option("--size", size, "k or l for --family");
  recur->add_option("--mode", mode)->check(CLI::IsMember({"printed", "validated"}));
  recur->add_option("--backend", backend)->check(CLI::IsMember({"exact", "bigfloat"}));
  recur->add_option("--mantissa-bits", mantissa, "BigFloat precision (0 = automatic)");
  recur->add_option("--state-budget", state_budget, "Refuse above this many memo states");
  add_format(recur, c);

  // mc
  McConfig mc_cfg;
  double rel_err = 0.1;
  bool force = false;
  auto* mc = app.add_subcommand("mc", "Seeded Monte Carlo estimates");
  mc->add_option("--m", c.m)->required();
  mc->add_option("--n", c.n)->required();
  mc->add_option("--placement", c.placement);
  mc->add_option("--event", c.event);
  mc->add_option("--p", c.p);
  mc->add_option("--trials", mc_cfg.trials);
  mc->add_option("--seed", mc_cfg.seed);
  mc->add_option("--batch-size", mc_cfg.batch_size);
  mc->add_option("--threads", mc_cfg.workers);
  mc->add_option("--target-rel-err", rel_err, "Relative error used by the feasibility check");
  mc->add_flag("--force", force, "Run even when the feasibility check refuses");
  add_format(mc, c);

  // limits
  int gap = -1;
  auto* limits = app.add_subcommand("limits", "Limit table and finite-size estimates");
  limits->add_option("--m", c.m);
  limits->add_option("--n", c.n);
  limits->add_option("--placement", c.placement);
  limits->add_option("--gap", gap, "Evaluate the quoted XXY closed form at n - m = GAP");

  // verify
  VerifyOptions vopt;
  bool acceptance = false;
  std::string golden_dir = "golden";
  auto* verify = app.add_subcommand("verify", "Cross-method consistency gate");
  verify->add_option("--max-mn", vopt.max_mn);
  verify->add_option("--property-max-mn", vopt.property_max_mn);
  verify->add_option("--trials", vopt.trials);
  verify->add_option("--seed", vopt.seed);
  verify->add_option("--threads", vopt.threads);
  verify->add_flag("--acceptance", acceptance, "Run the acceptance criteria instead");
  verify->add_option("--golden-dir", golden_dir, "Golden files for --acceptance");
  verify->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"negate-gy"}));
  verify->add_option("--format", c.format)->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--out", c.out);

  // sweep
  std::string pairs, beta, n_values, q2_m, placements = "all-x,xxy,xyx", methods = "recursion";
  std::string report;
  double mc_budget = kDefaultTrialBudget;
  auto* sweep = app.add_subcommand("sweep", "Grid of shapes, placements and methods");
  sweep->add_option("--pairs", pairs, "Explicit shapes, e.g. 4x4,6x8");
  sweep->add_option("--beta", beta, "m = floor(beta n), as NUM/DEN");
  sweep->add_option("--n-values", n_values, "n list for --beta, e.g. 8,12,16 or 8..24");
  sweep->add_option("--q2-m", q2_m, "m list for the n = 2^m rule");
  sweep->add_option("--placements", placements);
  sweep->add_option("--methods", methods, "oracle, recursion, mc, asymptotic");
  sweep->add_option("--backend", backend)->check(CLI::IsMember({"exact", "bigfloat"}));
  sweep->add_option("--state-budget", state_budget);
  sweep->add_option("--max-mn", c.max_mn);
  sweep->add_option("--threads", c.threads);
  sweep->add_option("--trials", mc_cfg.trials);
  sweep->add_option("--seed", mc_cfg.seed);
  sweep->add_option("--batch-size", mc_cfg.batch_size);
  sweep->add_option("--target-rel-err", rel_err);
  sweep->add_option("--mc-budget", mc_budget, "Trial budget for MC feasibility");
  sweep->add_option("--report", report, "Convergence report path (csv output)");
  add_format(sweep, c);

  // q2
  unsigned m_min = 2, m_max = 6;
  auto* q2 = app.add_subcommand("q2", "All-x rc on the scale n = 2^m");
  q2->add_option("--m-min", m_min);
  q2->add_option("--m-max", m_max);
  q2->add_option("--max-mn", c.max_mn);
  q2->add_option("--threads", c.threads);
  q2->add_option("--state-budget", state_budget);
  add_format(q2, c);

  // erratum
  unsigned erratum_mn = 12;
  std::string prefix = "erratum_report";
  auto* erratum = app.add_subcommand("erratum", "Both recursion systems against enumeration");
  erratum->add_option("--max-mn", erratum_mn);
  erratum->add_option("--threads", c.threads);
  erratum->add_option("--out", prefix, "Writes PREFIX.json and PREFIX.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    EngineOptions engine;
    engine.state_budget = state_budget;
    engine.mantissa_bits = mantissa;

    if (*oracle) {
      require_target(c);
      const GraphShape shape(c.m, c.n);
      const mpq_class p = parse_rational(c.p);
      if (!c.placement.empty()) {
        emit(c, render(c, {oracle_row(c.m, c.n, placement_of(c), p, enumeration(c))}));
      } else {
        const AvoidanceEvent e = parse_event(shape, c.event);
        const std::string value = p == mpq_class(1, 2)
                                      ? exact_prob(shape, e, enumeration(c)).to_string()
                                      : rational_string(exact_prob_biased(shape, e, p, enumeration(c)));
        emit(c, c.format == "json" ? "{\"schema_version\": 1, \"event\": \"" + e.to_string() +
                                         "\", \"p\": \"" + c.p + "\", \"value\": \"" + value + "\"}\n"
                                   : "event,p,value\n\"" + e.to_string() + "\"," + c.p + "," +
                                         value + "\n");
      }
    } else if (*recur) {
      const Mode md = *parse_mode(mode);
      if (c.placement.empty() == family.empty()) {
        throw InvalidArgument("give exactly one of --placement or --family");
      }
      if (!c.placement.empty()) {
        if (md != Mode::Validated) throw InvalidArgument("rc needs --mode validated");
        const Backend b = backend.empty() ? auto_backend(c.m, c.n) : *parse_backend(backend);
        emit(c, render(c, {recursion_row(c.m, c.n, placement_of(c), b, engine)}));
      } else {
        const auto fam = parse_family(family);
        if (!fam) throw InvalidArgument("unknown family '" + family + "'");
        const Backend b = backend.empty() ? Backend::ExactDyadic : *parse_backend(backend);
        RecursionEngine eng(md, b, engine);
        const MemoKey key{*fam, c.m, c.n, size};
        const RecurValue v = eng.eval(key);
        std::string value, error;
        if (v.exact) {
          value = v.exact->to_string();
        } else {
          value = v.approx->midpoint_string();
          error = format_double(v.approx->half_width());
        }
        if (c.format == "json") {
          emit(c, "{\"schema_version\": 1, \"key\": \"" + to_string(key) + "\", \"mode\": \"" +
                      mode + "\", \"value\": \"" + value + "\", \"error_bound\": \"" + error +
                      "\"}\n");
        } else {
          emit(c, "key,mode,value,error_bound\n\"" + to_string(key) + "\"," + mode + "," + value +
                      "," + error + "\n");
        }
      }
    } else if (*mc) {
      require_target(c);
      const GraphShape shape(c.m, c.n);
      mc_cfg.p = parse_rational(c.p);
      if (!c.placement.empty()) {
        const FeasibilityAdvice f = feasibility(shape, placement_of(c), rel_err);
        if (!f.feasible && !force) {
          std::cerr << f.summary << "\n";
          return kExitRefused;
        }
        emit(c, render(c, {mc_row(c.m, c.n, placement_of(c), mc_cfg)}));
      } else {
        const AvoidanceEvent e = parse_event(shape, c.event);
        const Estimate est = mc_estimate_event(shape, e, mc_cfg);
        std::ostringstream s;
        if (c.format == "json") {
          s << "{\"schema_version\": 1, \"event\": \"" << e.to_string() << "\", \"mean\": "
            << format_double(est.mean) << ", \"stderr\": " << format_double(est.std_error)
            << ", \"ci_low\": " << format_double(est.ci_low)
            << ", \"ci_high\": " << format_double(est.ci_high) << ", \"trials\": " << est.trials
            << ", \"seed\": " << mc_cfg.seed << ", \"method\": \"" << ci_method_name(est.method)
            << "\"}\n";
        } else {
          s << "event,mean,stderr,ci_low,ci_high,trials,seed,method\n\""
            << e.to_string() << "\"," << format_double(est.mean) << ","
            << format_double(est.std_error) << "," << format_double(est.ci_low) << ","
            << format_double(est.ci_high) << "," << est.trials << "," << mc_cfg.seed << ","
            << ci_method_name(est.method) << "\n";
        }
        emit(c, s.str());
      }
    } else if (*limits) {
      std::ostringstream s;
      if (gap >= 0) {
        s << "xxy closed form at gap " << gap << ": " << format_double(xxy_quoted_closed_form(gap))
          << "\n";
      }
      if (c.m != 0 || c.n != 0) {
        if (c.placement.empty()) throw InvalidArgument("--m/--n need --placement");
        const AtlasRow r = asymptotic_row(c.m, c.n, placement_of(c));
        s << rows_csv({r});
      } else if (gap < 0) {
        s << "placement,beta_class,limit,composed_limit\n";
        for (PlacementKind k : kAllPlacements) {
          if (!c.placement.empty() && k != placement_of(c)) continue;
          for (BetaClass b : kAllBetaClasses) {
            const ComposedLimit cl = composed_limit(k, b);
            s << placement_name(k) << "," << beta_class_name(b) << ","
              << rational_string(rc_limit(k, b)) << ","
              << (cl.diverges() ? std::string("-inf") : rational_string(*cl.value)) << "\n";
          }
        }
      }
      std::cout << s.str();
    } else if (*verify) {
      if (acceptance) {
        acceptance::Options ao;
        ao.golden_dir = golden_dir;
        ao.threads = vopt.threads;
        bool ok = true;
        for (const auto& r : acceptance::run_all(ao)) {
          std::cout << acceptance::format_line(r) << "\n";
          ok = ok && r.passed;
        }
        return ok ? 0 : kExitVerify;
      }
      if (fault == "negate-gy") vopt.recursion.fault = Fault::NegateGY;
      const VerifyReport r = cmd_verify(vopt);
      if (c.format == "csv") c.format = "text";
      emit(c, c.format == "json" ? verify_json(r) : verify_text(r));
      return r.ok() ? 0 : kExitVerify;
    } else if (*sweep) {
      SweepSpec spec;
      std::stringstream ps(pairs);
      std::string item;
      while (std::getline(ps, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos) throw InvalidArgument("bad pair '" + item + "' (expected MxN)");
        spec.pairs.emplace_back(parse_list(item.substr(0, x)).at(0),
                                parse_list(item.substr(x + 1)).at(0));
      }
      if (!beta.empty()) {
        spec.beta = parse_rational(beta);
        spec.beta_n = parse_list(n_values);
        if (spec.beta_n.empty()) throw InvalidArgument("--beta needs --n-values");
      }
      spec.q2_m = parse_list(q2_m);
      spec.placements.clear();
      for (const std::string& name : CLI::detail::split(placements, ',')) {
        auto p = parse_placement(name);
        if (!p) throw InvalidArgument("unknown placement '" + name + "'");
        spec.placements.push_back(*p);
      }
      spec.methods.clear();
      for (const std::string& name : CLI::detail::split(methods, ',')) {
        auto m = parse_method(name);
        if (!m) throw InvalidArgument("unknown method '" + name + "'");
        spec.methods.push_back(*m);
      }
      if (spec.pairs.empty() && !spec.beta && spec.q2_m.empty()) {
        throw InvalidArgument("give --pairs, --beta with --n-values, or --q2-m");
      }
      spec.oracle = enumeration(c);
      spec.recursion = engine;
      if (!backend.empty()) spec.backend = parse_backend(backend);
      spec.mc = mc_cfg;
      spec.mc_target_rel_err = rel_err;
      spec.mc_budget = mc_budget;
      const SweepResult r = run_sweep(spec);
      if (c.format == "json") {
        emit(c, sweep_json(r));
      } else {
        emit(c, rows_csv(r.rows));
        if (!r.convergence.empty()) {
          if (report.empty()) {
            std::cerr << convergence_text(r.convergence);
          } else {
            std::ofstream f(report);
            if (!f) throw InvalidArgument("cannot write " + report);
            f << convergence_text(r.convergence);
          }
        }
      }
    } else if (*q2) {
      Q2Options q;
      q.m_min = m_min;
      q.m_max = m_max;
      q.oracle = enumeration(c);
      q.recursion = engine;
      const Q2Result r = q2_probe(q);
      emit(c, render(c, r.rows));
      for (const auto& a : r.agreements) {
        std::cerr << "m=" << a.m << " " << a.label << ": oracle "
                  << (a.equal ? "equals" : "DIFFERS FROM") << " recursion\n";
      }
      for (const auto& a : r.agreements) {
        if (!a.equal) return kExitVerify;
      }
    } else if (*erratum) {
      EnumerationOptions e;
      e.max_mn = std::max(erratum_mn, kDefaultEnumerationCap);
      e.threads = c.threads;
      const ErratumReport r = erratum_report(erratum_mn, e);
      for (const auto& [suffix, text] :
           {std::pair{".json", erratum_json(r)}, std::pair{".txt", erratum_text(r)}}) {
        std::ofstream f(prefix + suffix);
        if (!f) throw InvalidArgument("cannot write " + prefix + suffix);
        f << text;
      }
      std::cout << "wrote " << prefix << ".json and " << prefix << ".txt\n";
      return r.validated_all_match() ? 0 : kExitVerify;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const PrecisionFailure& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  }
  return 0;
}

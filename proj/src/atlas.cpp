#include "bipcorr/atlas.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "bipcorr/errors.hpp"

namespace bipcorr {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Oracle: return "oracle";
    case Method::Recursion: return "recursion";
    case Method::MC: return "mc";
    case Method::Asymptotic: return "asymptotic";
    case Method::Skipped: return "skipped";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Oracle, Method::Recursion, Method::MC, Method::Asymptotic}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed3(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << v;
  return s.str();
}

double mpfr_to_double(mpfr_srcptr x, mpfr_rnd_t rnd) { return mpfr_get_d(x, rnd); }

AtlasRow base_row(unsigned m, unsigned n, PlacementKind placement, Method method) {
  AtlasRow r;
  r.m = m;
  r.n = n;
  r.placement = std::string(placement_name(placement));
  r.method = method;
  return r;
}

void fill_exact(AtlasRow& r, const ExactRcResult& e) {
  r.p = rational_string(e.p);
  auto pick = [](const std::optional<Dyadic>& d, const mpq_class& q) {
    return d ? d->to_string() : rational_string(q);
  };
  r.p_ac = pick(e.dyadic_ac, e.p_ac);
  r.p_bc = pick(e.dyadic_bc, e.p_bc);
  r.p_joint = pick(e.dyadic_joint, e.p_joint);
  r.covariance = pick(e.dyadic_covariance, e.covariance);
  if (e.rc) {
    r.rc = rational_string(*e.rc);
    r.rc_value = e.rc->get_d();
  } else {
    r.rc = "undefined";
  }
  r.sign = std::string(sign_name(e.sign));
}

}  // namespace

std::string csv_line(const AtlasRow& r) {
  std::ostringstream s;
  s << r.m << ',' << r.n << ',' << csv_field(r.placement) << ',' << method_name(r.method) << ','
    << csv_field(r.p) << ',' << csv_field(r.p_ac) << ',' << csv_field(r.p_bc) << ','
    << csv_field(r.p_joint) << ',' << csv_field(r.covariance) << ',' << csv_field(r.rc) << ','
    << csv_field(r.std_error) << ',' << csv_field(r.ci_low) << ',' << csv_field(r.ci_high) << ','
    << csv_field(r.sign) << ',' << (r.trials ? std::to_string(*r.trials) : "") << ','
    << (r.seed ? std::to_string(*r.seed) : "") << ',' << fixed3(r.runtime_ms);
  return s.str();
}

std::string rows_csv(const std::vector<AtlasRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const AtlasRow& r : rows) out += csv_line(r) + '\n';
  return out;
}

namespace {

nlohmann::json row_json(const AtlasRow& r) {
  nlohmann::json j{{"m", r.m},
                   {"n", r.n},
                   {"placement", r.placement},
                   {"method", method_name(r.method)},
                   {"p", r.p},
                   {"p_ac", r.p_ac},
                   {"p_bc", r.p_bc},
                   {"p_joint", r.p_joint},
                   {"covariance", r.covariance},
                   {"rc", r.rc},
                   {"stderr", r.std_error},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high},
                   {"sign", r.sign},
                   {"runtime_ms", r.runtime_ms}};
  j["trials"] = r.trials ? nlohmann::json(*r.trials) : nlohmann::json(nullptr);
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json rows_array(const std::vector<AtlasRow>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const AtlasRow& r : rows) a.push_back(row_json(r));
  return a;
}

}  // namespace

std::string rows_json(const std::vector<AtlasRow>& rows) {
  nlohmann::json doc{{"schema_version", 1}, {"rows", rows_array(rows)}};
  return doc.dump(2) + "\n";
}

AtlasRow oracle_row(unsigned m, unsigned n, PlacementKind placement, const mpq_class& p,
                    const EnumerationOptions& options) {
  const auto start = Clock::now();
  AtlasRow r = base_row(m, n, placement, Method::Oracle);
  fill_exact(r, exact_rc(GraphShape(m, n), placement, p, options));
  r.runtime_ms = elapsed_ms(start);
  return r;
}

AtlasRow recursion_row(unsigned m, unsigned n, PlacementKind placement, Backend backend,
                       const EngineOptions& options) {
  const auto start = Clock::now();
  AtlasRow r = base_row(m, n, placement, Method::Recursion);
  const RcRecursionResult res = rc_recursion(m, n, placement, backend, options);
  if (res.exact) {
    fill_exact(r, *res.exact);
  } else {
    const ApproxRcResult& a = *res.approx;
    r.p_ac = a.p_ac.midpoint_string();
    r.p_bc = a.p_bc.midpoint_string();
    r.p_joint = a.p_joint.midpoint_string();
    r.covariance = a.covariance.midpoint_string();
    r.rc = a.rc.midpoint_string();
    r.rc_value = a.rc.midpoint();
    r.std_error = format_double(a.covariance.half_width());
    r.ci_low = format_double(mpfr_to_double(a.covariance.lo(), MPFR_RNDD));
    r.ci_high = format_double(mpfr_to_double(a.covariance.hi(), MPFR_RNDU));
    r.sign = std::string(verdict_name(a.sign));
  }
  r.runtime_ms = elapsed_ms(start);
  return r;
}

AtlasRow mc_row(unsigned m, unsigned n, PlacementKind placement, const McConfig& cfg) {
  const auto start = Clock::now();
  AtlasRow r = base_row(m, n, placement, Method::MC);
  const RcEstimate e = mc_estimate_rc(GraphShape(m, n), placement, cfg);
  r.p = rational_string(cfg.p);
  r.p_ac = format_double(e.p_ac.mean);
  r.p_bc = format_double(e.p_bc.mean);
  r.p_joint = format_double(e.p_joint.mean);
  r.covariance = format_double(e.covariance.mean);
  r.rc = e.rc ? format_double(*e.rc) : "undefined";
  r.rc_value = e.rc;
  r.std_error = format_double(e.covariance.std_error);
  r.ci_low = format_double(e.covariance.ci_low);
  r.ci_high = format_double(e.covariance.ci_high);
  r.sign = std::string(verdict_name(e.sign));
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

AtlasRow asymptotic_row(unsigned m, unsigned n, PlacementKind placement) {
  const auto start = Clock::now();
  AtlasRow r = base_row(m, n, placement, Method::Asymptotic);
  LemmaId a = LemmaId::I, b = LemmaId::I, joint = LemmaId::IV;
  if (placement == PlacementKind::XXY) {
    b = LemmaId::II;
    joint = LemmaId::V;
  } else if (placement == PlacementKind::XYX) {
    a = b = LemmaId::II;
    joint = LemmaId::III;
  }
  const double pa = lemma_estimate(a, m, n), pb = lemma_estimate(b, m, n);
  const double pj = lemma_estimate(joint, m, n);
  const double rc = rc_finite_estimate(placement, m, n);
  r.p_ac = format_double(pa);
  r.p_bc = format_double(pb);
  r.p_joint = format_double(pj);
  r.covariance = format_double(pj - pa * pb);
  r.rc = format_double(rc);
  r.rc_value = rc;
  r.sign = rc < 0 ? "negative" : (rc > 0 ? "positive" : "zero");
  r.runtime_ms = elapsed_ms(start);
  return r;
}

AtlasRow skipped_row(unsigned m, unsigned n, std::string placement, std::string reason) {
  AtlasRow r;
  r.m = m;
  r.n = n;
  r.placement = std::move(placement);
  r.method = Method::Skipped;
  r.sign = std::move(reason);
  return r;
}

Backend auto_backend(unsigned m, unsigned n) {
  return std::uint64_t{m} * n <= kAutoExactMaxMn ? Backend::ExactDyadic : Backend::BigFloat;
}

namespace {

std::string shape_name(unsigned m, unsigned n) {
  return "K_{" + std::to_string(m) + "," + std::to_string(n) + "}";
}

std::optional<std::string> recursion_guard(unsigned m, unsigned n, PlacementKind placement,
                                           const EngineOptions& options) {
  const Family joint = placement == PlacementKind::AllInX ? Family::GX
                       : placement == PlacementKind::XXY  ? Family::GY
                                                          : Family::HX;
  const std::uint64_t states = estimated_states({joint, m, n, 1});
  if (states > options.state_budget) {
    return "recursion needs about " + std::to_string(states) + " states, above the budget of " +
           std::to_string(options.state_budget);
  }
  return std::nullopt;
}

AtlasRow run_cell(const SweepSpec& spec, unsigned m, unsigned n, PlacementKind placement,
                  Method method) {
  const std::string pname(placement_name(placement));
  const std::string tag = std::string(method_name(method)) + ": ";
  if (m < 2 || n < 2) return skipped_row(m, n, pname, tag + "sweep cells need m, n >= 2");
  const GraphShape shape(m, n);
  if (!placement_fits(shape, placement)) {
    return skipped_row(m, n, pname, tag + pname + " does not fit " + shape_name(m, n));
  }
  try {
    switch (method) {
      case Method::Oracle:
        if (shape.edge_count() > spec.oracle.max_mn) {
          return skipped_row(m, n, pname,
                             tag + "m*n = " + std::to_string(shape.edge_count()) +
                                 " exceeds the enumeration cap of " +
                                 std::to_string(spec.oracle.max_mn));
        }
        return oracle_row(m, n, placement, spec.mc.p, spec.oracle);
      case Method::Recursion:
        if (auto why = recursion_guard(m, n, placement, spec.recursion)) {
          return skipped_row(m, n, pname, tag + *why);
        }
        return recursion_row(m, n, placement, spec.backend.value_or(auto_backend(m, n)),
                             spec.recursion);
      case Method::MC: {
        const FeasibilityAdvice f =
            feasibility(shape, placement, spec.mc_target_rel_err, spec.mc_budget);
        if (!f.feasible) return skipped_row(m, n, pname, tag + f.summary);
        return mc_row(m, n, placement, spec.mc);
      }
      case Method::Asymptotic: return asymptotic_row(m, n, placement);
      case Method::Skipped: break;
    }
  } catch (const BudgetExceeded& e) {
    return skipped_row(m, n, pname, tag + e.what());
  } catch (const PrecisionFailure& e) {
    return skipped_row(m, n, pname, tag + e.what());
  }
  return skipped_row(m, n, pname, "no method");
}

unsigned beta_m(const mpq_class& beta, unsigned n) {
  const mpq_class scaled = beta * n;
  const mpz_class f = scaled.get_num() / scaled.get_den();  // floor for positive values
  return static_cast<unsigned>(f.get_ui());
}

void assess(ConvergenceCell& c) {
  auto limit_text = [](const ComposedLimit& l) {
    return l.diverges() ? std::string("diverges to -infinity") : rational_string(*l.value);
  };
  if (c.composed.diverges() || *c.composed.value != c.printed_limit) {
    c.flagged = true;
    c.reasons.push_back("lemma-composed estimate " + limit_text(c.composed) +
                        ", printed limit " + rational_string(c.printed_limit));
  }
  const double target = c.printed_limit.get_d();
  std::vector<std::pair<unsigned, double>> d;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    if (c.exact_rc[i]) d.emplace_back(c.n[i], std::fabs(*c.exact_rc[i] - target));
  }
  if (d.size() >= 2 && d.back().second > d[d.size() - 2].second) {
    c.flagged = true;
    c.reasons.push_back("distance of the exact values to the printed limit grows from " +
                        format_double(d[d.size() - 2].second) + " (n = " +
                        std::to_string(d[d.size() - 2].first) + ") to " +
                        format_double(d.back().second) + " (n = " +
                        std::to_string(d.back().first) + ")");
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  std::vector<std::pair<unsigned, unsigned>> shapes = spec.pairs;
  if (spec.beta) {
    if (*spec.beta <= 0) throw InvalidArgument("beta must be positive");
    for (unsigned n : spec.beta_n) shapes.emplace_back(beta_m(*spec.beta, n), n);
  }
  for (unsigned m : spec.q2_m) {
    if (m > 30) throw InvalidArgument("q2 rule supports m <= 30");
    shapes.emplace_back(m, 1u << m);
  }
  SweepResult out;
  std::map<std::tuple<unsigned, unsigned, PlacementKind>, std::optional<double>> recursion_rc;
  for (const auto& [m, n] : shapes) {
    for (PlacementKind placement : spec.placements) {
      for (Method method : spec.methods) {
        AtlasRow row = run_cell(spec, m, n, placement, method);
        if (method == Method::Recursion && row.method == Method::Recursion) {
          recursion_rc[{m, n, placement}] = row.rc_value;
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  if (spec.beta) {
    const BetaClass cls = classify_beta(*spec.beta);
    for (PlacementKind placement : spec.placements) {
      ConvergenceCell cell;
      cell.placement = placement;
      cell.beta = *spec.beta;
      cell.beta_class = cls;
      cell.printed_limit = rc_limit(placement, cls);
      cell.composed = composed_limit(placement, cls);
      for (unsigned n : spec.beta_n) {
        const unsigned m = beta_m(*spec.beta, n);
        if (m < 2 || n < 2 || !placement_fits(GraphShape(m, n), placement)) continue;
        cell.m.push_back(m);
        cell.n.push_back(n);
        cell.estimate.push_back(rc_finite_estimate(placement, m, n));
        auto it = recursion_rc.find({m, n, placement});
        if (it != recursion_rc.end()) {
          cell.exact_rc.push_back(it->second);
        } else if (!recursion_guard(m, n, placement, spec.recursion)) {
          cell.exact_rc.push_back(
              recursion_row(m, n, placement, auto_backend(m, n), spec.recursion).rc_value);
        } else {
          cell.exact_rc.push_back(std::nullopt);
        }
      }
      assess(cell);
      out.convergence.push_back(std::move(cell));
    }
  }
  return out;
}

std::string convergence_text(const std::vector<ConvergenceCell>& cells) {
  std::ostringstream s;
  s << "Convergence report\n";
  for (const ConvergenceCell& c : cells) {
    s << "\n" << placement_name(c.placement) << " beta=" << rational_string(c.beta) << " ("
      << beta_class_name(c.beta_class) << ")" << (c.flagged ? "  FLAG: manual review" : "")
      << "\n";
    s << "  printed limit: " << rational_string(c.printed_limit) << "\n";
    s << "  lemma-composed limit: "
      << (c.composed.diverges() ? "diverges to -infinity" : rational_string(*c.composed.value))
      << "\n";
    for (std::size_t i = 0; i < c.n.size(); ++i) {
      s << "  n=" << c.n[i] << " m=" << c.m[i] << "  exact rc="
        << (c.exact_rc[i] ? format_double(*c.exact_rc[i]) : std::string("n/a"))
        << "  composed estimate=" << format_double(c.estimate[i]) << "\n";
    }
    for (const std::string& r : c.reasons) s << "  note: " << r << "\n";
  }
  return s.str();
}

namespace {

nlohmann::json convergence_array(const std::vector<ConvergenceCell>& cells) {
  nlohmann::json a = nlohmann::json::array();
  for (const ConvergenceCell& c : cells) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < c.n.size(); ++i) {
      points.push_back({{"m", c.m[i]},
                        {"n", c.n[i]},
                        {"exact_rc", c.exact_rc[i] ? nlohmann::json(format_double(*c.exact_rc[i]))
                                                   : nlohmann::json(nullptr)},
                        {"composed_estimate", format_double(c.estimate[i])}});
    }
    a.push_back({{"placement", placement_name(c.placement)},
                 {"beta", rational_string(c.beta)},
                 {"beta_class", beta_class_name(c.beta_class)},
                 {"printed_limit", rational_string(c.printed_limit)},
                 {"composed_limit", c.composed.diverges() ? std::string("-inf")
                                                          : rational_string(*c.composed.value)},
                 {"points", points},
                 {"flagged", c.flagged},
                 {"reasons", c.reasons}});
  }
  return a;
}

}  // namespace

std::string convergence_json(const std::vector<ConvergenceCell>& cells) {
  nlohmann::json doc{{"schema_version", 1}, {"convergence", convergence_array(cells)}};
  return doc.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& result) {
  nlohmann::json doc{{"schema_version", 1},
                     {"rows", rows_array(result.rows)},
                     {"convergence", convergence_array(result.convergence)}};
  return doc.dump(2) + "\n";
}

Q2Result q2_probe(const Q2Options& options) {
  if (options.m_min < 1 || options.m_max > 30 || options.m_min > options.m_max) {
    throw InvalidArgument("q2 needs 1 <= m_min <= m_max <= 30");
  }
  Q2Result out;
  const std::string pname(placement_name(PlacementKind::AllInX));
  for (unsigned m = options.m_min; m <= options.m_max; ++m) {
    const unsigned big = 1u << m;
    for (const auto& [label, rows, cols] :
         {std::tuple{std::string("small"), m, big}, std::tuple{std::string("large"), big, m}}) {
      if (rows < 3) {
        out.rows.push_back(skipped_row(rows, cols, pname,
                                       "triple in the class of size " + std::to_string(rows) +
                                           " needs at least 3 vertices"));
        continue;
      }
      std::optional<AtlasRow> oracle, recursion;
      if (std::uint64_t{rows} * cols <= options.oracle.max_mn) {
        oracle = oracle_row(rows, cols, PlacementKind::AllInX, mpq_class(1, 2), options.oracle);
        out.rows.push_back(*oracle);
      }
      if (auto why = recursion_guard(rows, cols, PlacementKind::AllInX, options.recursion)) {
        out.rows.push_back(skipped_row(rows, cols, pname, "recursion: " + *why));
      } else {
        try {
          recursion = recursion_row(rows, cols, PlacementKind::AllInX, auto_backend(rows, cols),
                                    options.recursion);
          out.rows.push_back(*recursion);
        } catch (const PrecisionFailure& e) {
          out.rows.push_back(skipped_row(rows, cols, pname, std::string("recursion: ") + e.what()));
        }
      }
      if (oracle && recursion && recursion->std_error.empty()) {
        const bool equal = oracle->p_ac == recursion->p_ac && oracle->p_bc == recursion->p_bc &&
                           oracle->p_joint == recursion->p_joint && oracle->rc == recursion->rc;
        out.agreements.push_back({m, label, equal});
      }
    }
  }
  return out;
}

}  // namespace bipcorr

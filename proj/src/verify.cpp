#include <json.hpp>

#include <cmath>
#include <sstream>

#include "bipcorr/atlas.hpp"
#include "bipcorr/errors.hpp"

namespace bipcorr {

namespace {

// Property checks walk every orientation through the model layer, so they
// exercise a different reachability route than the enumeration kernel.
constexpr unsigned kModelWalkMaxMn = 16;

unsigned vertex_count(const GraphShape& s) { return s.m() + s.n(); }

Vertex vertex_at(const GraphShape& s, unsigned k) {
  return k < s.m() ? x_vertex(k) : y_vertex(k - s.m());
}

void require_walkable(const GraphShape& shape) {
  if (shape.edge_count() > kModelWalkMaxMn) {
    throw InvalidArgument("property checks need m*n <= " + std::to_string(kModelWalkMaxMn));
  }
}

/// R[u * V + v] = reaches(o, u, v) over the combined vertex numbering.
std::vector<bool> reach_matrix(const Orientation& o) {
  const GraphShape& s = o.shape();
  const unsigned nv = vertex_count(s);
  std::vector<bool> r(std::size_t{nv} * nv);
  for (unsigned u = 0; u < nv; ++u) {
    for (unsigned v = 0; v < nv; ++v) r[u * nv + v] = reaches(o, vertex_at(s, u), vertex_at(s, v));
  }
  return r;
}

template <class Fn>
void for_each_orientation(const GraphShape& shape, Fn&& fn) {
  const std::uint64_t total = std::uint64_t{1} << shape.edge_count();
  for (std::uint64_t i = 0; i < total; ++i) fn(i, orientation_from_index(shape, i));
}

std::string shape_label(const GraphShape& s) {
  return "K_{" + std::to_string(s.m()) + "," + std::to_string(s.n()) + "}";
}

std::string atom_label(const Vertex& u, const Vertex& v) {
  return to_string(u) + "->" + to_string(v);
}

struct PairEvents {
  std::vector<AvoidanceEvent> events;
  std::vector<std::pair<unsigned, unsigned>> pairs;
};

PairEvents all_pair_events(const GraphShape& s) {
  PairEvents out;
  const unsigned nv = vertex_count(s);
  for (unsigned u = 0; u < nv; ++u) {
    for (unsigned v = 0; v < nv; ++v) {
      if (u == v) continue;
      out.events.emplace_back(s, std::vector<Atom>{{vertex_at(s, u), vertex_at(s, v)}});
      out.pairs.emplace_back(u, v);
    }
  }
  return out;
}

Orientation permute_x(const Orientation& o, unsigned a, unsigned b) {
  const GraphShape& s = o.shape();
  OrientationBuilder builder(s);
  for (unsigned i = 0; i < s.m(); ++i) {
    const unsigned to = i == a ? b : (i == b ? a : i);
    for (unsigned j = 0; j < s.n(); ++j) builder.set(to, j, o.flag(i, j));
  }
  return std::move(builder).build();
}

Orientation permute_y(const Orientation& o, unsigned a, unsigned b) {
  const GraphShape& s = o.shape();
  OrientationBuilder builder(s);
  for (unsigned j = 0; j < s.n(); ++j) {
    const unsigned to = j == a ? b : (j == b ? a : j);
    for (unsigned i = 0; i < s.m(); ++i) builder.set(i, to, o.flag(i, j));
  }
  return std::move(builder).build();
}

/// Every (x, y, z) realizing the placement kind with distinct vertices.
std::vector<Placement> realizations(const GraphShape& s, PlacementKind kind) {
  std::vector<Placement> out;
  const unsigned m = s.m(), n = s.n();
  for (unsigned a = 0; a < m; ++a) {
    for (unsigned b = 0; b < m; ++b) {
      if (a == b) continue;
      if (kind == PlacementKind::AllInX) {
        for (unsigned c = 0; c < m; ++c) {
          if (c != a && c != b) out.push_back({kind, x_vertex(a), x_vertex(b), x_vertex(c)});
        }
      } else {
        for (unsigned j = 0; j < n; ++j) {
          if (kind == PlacementKind::XXY) {
            out.push_back({kind, x_vertex(a), x_vertex(b), y_vertex(j)});
          } else {
            out.push_back({kind, x_vertex(a), y_vertex(j), x_vertex(b)});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> check_complement(const GraphShape& shape) {
  require_walkable(shape);
  const PairEvents pe = all_pair_events(shape);
  const std::vector<EventTally> avoid = tally_events(shape, pe.events);
  const unsigned nv = vertex_count(shape);
  std::vector<std::uint64_t> reach(pe.pairs.size());
  for_each_orientation(shape, [&](std::uint64_t, const Orientation& o) {
    const std::vector<bool> r = reach_matrix(o);
    for (std::size_t k = 0; k < pe.pairs.size(); ++k) {
      reach[k] += r[pe.pairs[k].first * nv + pe.pairs[k].second];
    }
  });
  std::vector<std::string> failures;
  const std::uint64_t total = std::uint64_t{1} << shape.edge_count();
  for (std::size_t k = 0; k < pe.pairs.size(); ++k) {
    if (avoid[k].count() + reach[k] != total) {
      failures.push_back(shape_label(shape) + " " +
                         atom_label(vertex_at(shape, pe.pairs[k].first),
                                    vertex_at(shape, pe.pairs[k].second)) +
                         ": avoid " + std::to_string(avoid[k].count()) + " + reach " +
                         std::to_string(reach[k]) + " != " + std::to_string(total));
    }
  }
  return failures;
}

std::vector<std::string> check_reversal(const GraphShape& shape, const mpq_class& p) {
  require_walkable(shape);
  std::vector<std::string> failures;
  const unsigned nv = vertex_count(shape);
  if (p == mpq_class(1, 2)) {
    for_each_orientation(shape, [&](std::uint64_t index, const Orientation& o) {
      const std::vector<bool> fwd = reach_matrix(o);
      const std::vector<bool> rev = reach_matrix(reverse(o));
      for (unsigned u = 0; u < nv; ++u) {
        for (unsigned v = 0; v < nv; ++v) {
          if (rev[u * nv + v] != fwd[v * nv + u] && failures.size() < 20) {
            failures.push_back(shape_label(shape) + " orientation " + std::to_string(index) +
                               ": reversed reachability differs at " +
                               atom_label(vertex_at(shape, u), vertex_at(shape, v)));
          }
        }
      }
    });
  }

  // Probability level: value at p equals the reversed event's value at 1 - p.
  std::vector<AvoidanceEvent> events, reversed;
  const PairEvents pe = all_pair_events(shape);
  for (const AvoidanceEvent& e : pe.events) {
    const Atom a = e.atoms()[0];
    events.push_back(e);
    reversed.emplace_back(shape, std::vector<Atom>{{a.target, a.source}});
  }
  for (PlacementKind kind : kAllPlacements) {
    if (!placement_fits(shape, kind)) continue;
    const PlacementEvents pl = placement_events(shape, kind);
    std::vector<Atom> flipped;
    for (const Atom& a : pl.joint.atoms()) flipped.push_back({a.target, a.source});
    events.push_back(pl.joint);
    reversed.emplace_back(shape, flipped);
  }
  const std::vector<EventTally> t = tally_events(shape, events);
  const std::vector<EventTally> tr = tally_events(shape, reversed);
  const mpq_class q = 1 - p;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const mpq_class lhs = t[k].biased(p), rhs = tr[k].biased(q);
    if (lhs != rhs) {
      failures.push_back(shape_label(shape) + " " + events[k].to_string() + " at p=" +
                         rational_string(p) + ": " + rational_string(lhs) + " vs reversed " +
                         rational_string(rhs));
    }
  }
  return failures;
}

std::vector<std::string> check_relabeling(const GraphShape& shape) {
  require_walkable(shape);
  std::vector<std::string> failures;
  const unsigned nv = vertex_count(shape), m = shape.m();
  auto swap_index = [](unsigned k, unsigned a, unsigned b) {
    return k == a ? b : (k == b ? a : k);
  };
  for_each_orientation(shape, [&](std::uint64_t index, const Orientation& o) {
    const std::vector<bool> base = reach_matrix(o);
    auto compare = [&](const Orientation& moved, unsigned a, unsigned b, const char* side) {
      const std::vector<bool> r = reach_matrix(moved);
      for (unsigned u = 0; u < nv; ++u) {
        for (unsigned v = 0; v < nv; ++v) {
          if (r[swap_index(u, a, b) * nv + swap_index(v, a, b)] != base[u * nv + v] &&
              failures.size() < 20) {
            failures.push_back(shape_label(shape) + " orientation " + std::to_string(index) +
                               ": swapping " + side + " labels breaks " +
                               atom_label(vertex_at(shape, u), vertex_at(shape, v)));
          }
        }
      }
    };
    for (unsigned i = 0; i + 1 < shape.m(); ++i) compare(permute_x(o, i, i + 1), i, i + 1, "X");
    for (unsigned j = 0; j + 1 < shape.n(); ++j) {
      compare(permute_y(o, j, j + 1), m + j, m + j + 1, "Y");
    }
  });

  for (PlacementKind kind : kAllPlacements) {
    if (!placement_fits(shape, kind)) continue;
    const std::vector<Placement> all = realizations(shape, kind);
    std::vector<AvoidanceEvent> events;
    for (const Placement& pl : all) {
      events.emplace_back(shape, std::vector<Atom>{{pl.x, pl.y}});
      events.emplace_back(shape, std::vector<Atom>{{pl.y, pl.z}});
      events.emplace_back(shape, std::vector<Atom>{{pl.x, pl.y}, {pl.y, pl.z}});
    }
    const std::vector<EventTally> t = tally_events(shape, events);
    for (std::size_t r = 1; r < all.size(); ++r) {
      for (std::size_t k = 0; k < 3; ++k) {
        if (t[3 * r + k].count() != t[k].count()) {
          failures.push_back(shape_label(shape) + " " + std::string(placement_name(kind)) +
                             ": " + events[3 * r + k].to_string() + " has count " +
                             std::to_string(t[3 * r + k].count()) + ", canonical " +
                             std::to_string(t[k].count()));
        }
      }
    }
  }
  return failures;
}

std::vector<std::string> check_mcdiarmid(const GraphShape& shape) {
  require_walkable(shape);
  const unsigned nv = vertex_count(shape);
  std::vector<std::uint64_t> pair(std::size_t{nv} * nv), triple(std::size_t{nv} * nv * nv);
  for_each_orientation(shape, [&](std::uint64_t, const Orientation& o) {
    const std::vector<bool> r = reach_matrix(o);
    for (unsigned x = 0; x < nv; ++x) {
      for (unsigned y = 0; y < nv; ++y) {
        if (!r[x * nv + y]) continue;
        ++pair[x * nv + y];
        for (unsigned z = 0; z < nv; ++z) triple[(x * nv + y) * nv + z] += r[x * nv + z];
      }
    }
  });
  std::vector<std::string> failures;
  const unsigned __int128 total = std::uint64_t{1} << shape.edge_count();
  for (unsigned x = 0; x < nv; ++x) {
    for (unsigned y = 0; y < nv; ++y) {
      for (unsigned z = 0; z < nv; ++z) {
        if (x == y || x == z || y == z) continue;
        const unsigned __int128 lhs = total * triple[(x * nv + y) * nv + z];
        const unsigned __int128 rhs =
            static_cast<unsigned __int128>(pair[x * nv + y]) * pair[x * nv + z];
        if (lhs < rhs) {
          failures.push_back(shape_label(shape) + " x=" + to_string(vertex_at(shape, x)) +
                             " y=" + to_string(vertex_at(shape, y)) +
                             " z=" + to_string(vertex_at(shape, z)) +
                             ": P(x->y, x->z) < P(x->y) P(x->z)");
        }
      }
    }
  }
  return failures;
}

std::vector<std::string> check_forced_third_avoidance(const GraphShape& shape) {
  require_walkable(shape);
  const unsigned nv = vertex_count(shape), m = shape.m();
  // Three shapes of the closure: (c, b, a) with c, b, a in X; c in X, b in Y;
  // c in Y, b in X. In each case a is in X.
  std::uint64_t violations[3] = {0, 0, 0};
  std::string example[3];
  for_each_orientation(shape, [&](std::uint64_t index, const Orientation& o) {
    const std::vector<bool> r = reach_matrix(o);
    for (unsigned a = 0; a < m; ++a) {
      for (unsigned b = 0; b < nv; ++b) {
        if (b == a) continue;
        for (unsigned c = 0; c < nv; ++c) {
          if (c == a || c == b) continue;
          const bool b_in_x = b < m, c_in_x = c < m;
          int variant;
          if (b_in_x && c_in_x) {
            variant = 0;
          } else if (c_in_x) {
            variant = 1;
          } else if (b_in_x) {
            variant = 2;
          } else {
            continue;
          }
          if (!r[c * nv + b] && !r[b * nv + a] && r[c * nv + a]) {
            if (violations[variant]++ == 0) {
              example[variant] = "orientation " + std::to_string(index) +
                                 " c=" + to_string(vertex_at(shape, c)) +
                                 " b=" + to_string(vertex_at(shape, b)) +
                                 " a=" + to_string(vertex_at(shape, a));
            }
          }
        }
      }
    }
  });
  static constexpr const char* kNames[3] = {"c,b,a in X", "c in X, b in Y, a in X",
                                            "c in Y, b in X, a in X"};
  std::vector<std::string> failures;
  for (int v = 0; v < 3; ++v) {
    if (violations[v] != 0) {
      failures.push_back(shape_label(shape) + " " + kNames[v] + ": " +
                         std::to_string(violations[v]) + " violations, first " + example[v]);
    }
  }
  return failures;
}

bool VerifyReport::ok() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  std::size_t f = 0;
  for (const CheckResult& c : checks) f += !c.passed;
  return f;
}

namespace {

std::vector<GraphShape> shapes_up_to(unsigned max_mn) {
  std::vector<GraphShape> out;
  for (unsigned m = 1; m <= max_mn; ++m) {
    for (unsigned n = 1; m * n <= max_mn; ++n) out.emplace_back(m, n);
  }
  return out;
}

struct Collector {
  CheckResult result;
  std::size_t cases = 0;
  std::size_t failed = 0;

  explicit Collector(std::string name) { result.name = std::move(name); }

  void add(std::vector<std::string> failures) {
    ++cases;
    if (failures.empty()) return;
    ++failed;
    result.passed = false;
    for (std::string& f : failures) {
      if (!result.detail.empty()) result.detail += "; ";
      result.detail += std::move(f);
    }
  }

  CheckResult finish(const std::string& unit) {
    const std::string summary = std::to_string(cases - failed) + "/" + std::to_string(cases) +
                                " " + unit + " pass";
    result.detail = result.detail.empty() ? summary : summary + "; " + result.detail;
    return std::move(result);
  }
};

bool same_exact(const ExactRcResult& a, const ExactRcResult& b) {
  return a.p_ac == b.p_ac && a.p_bc == b.p_bc && a.p_joint == b.p_joint && a.rc == b.rc;
}

}  // namespace

VerifyReport cmd_verify(const VerifyOptions& options) {
  EnumerationOptions oracle;
  oracle.max_mn = std::max(options.max_mn, kDefaultEnumerationCap);
  oracle.threads = options.threads;
  check_enumeration_cap(GraphShape(1, options.max_mn), oracle);
  if (options.property_max_mn > kModelWalkMaxMn) {
    throw InvalidArgument("property_max_mn must be at most " + std::to_string(kModelWalkMaxMn));
  }

  VerifyReport report;
  RecursionEngine engine(Mode::Validated, Backend::ExactDyadic, options.recursion);
  Collector exact("oracle = recursion");
  Collector mc("mc within 4 stderr of oracle");

  McConfig cfg;
  cfg.trials = options.trials;
  cfg.seed = options.seed;
  cfg.workers = options.threads;
  cfg.batch_size = std::max<std::uint64_t>(1, options.trials / 32);

  for (const GraphShape& shape : shapes_up_to(options.max_mn)) {
    for (PlacementKind kind : kAllPlacements) {
      if (!placement_fits(shape, kind)) continue;
      const std::string label =
          shape_label(shape) + " " + std::string(placement_name(kind));
      const ExactRcResult truth = exact_rc(shape, kind, mpq_class(1, 2), oracle);
      const RcRecursionResult rec = rc_recursion(engine, shape.m(), shape.n(), kind);
      const bool agree = same_exact(truth, *rec.exact);
      exact.add(agree ? std::vector<std::string>{}
                      : std::vector<std::string>{label + ": oracle rc " +
                                                 (truth.rc ? rational_string(*truth.rc) : "undefined") +
                                                 ", recursion rc " +
                                                 (rec.exact->rc ? rational_string(*rec.exact->rc)
                                                                : "undefined")});
      const bool k31 = shape.m() == 3 && shape.n() == 1;
      if (!agree || k31) {
        report.rows.push_back(oracle_row(shape.m(), shape.n(), kind, mpq_class(1, 2), oracle));
        report.rows.push_back(recursion_row(shape.m(), shape.n(), kind, Backend::ExactDyadic,
                                            options.recursion));
      }

      const RcEstimate est = mc_estimate_rc(shape, kind, cfg);
      std::vector<std::string> misses;
      auto within = [&](const char* what, const Estimate& e, const mpq_class& value) {
        const double diff = std::fabs(e.mean - value.get_d());
        if (diff > 4 * e.std_error + 1e-12) {
          misses.push_back(label + " " + what + ": mean " + format_double(e.mean) + " vs " +
                           rational_string(value) + " (stderr " + format_double(e.std_error) +
                           ")");
        }
      };
      within("p_ac", est.p_ac, truth.p_ac);
      within("p_bc", est.p_bc, truth.p_bc);
      within("p_joint", est.p_joint, truth.p_joint);
      mc.add(std::move(misses));
    }
  }
  report.checks.push_back(exact.finish("shape/placement cases"));
  report.checks.push_back(mc.finish("shape/placement cases"));

  Collector complement("complement identity");
  Collector reversal_half("reversal symmetry p=1/2");
  Collector reversal_biased("reversal symmetry p=1/3 vs 2/3");
  Collector relabel("relabeling invariance");
  Collector mcd("McDiarmid positivity");
  Collector forced("forced-third-avoidance");
  for (const GraphShape& shape : shapes_up_to(options.property_max_mn)) {
    complement.add(check_complement(shape));
    reversal_half.add(check_reversal(shape, mpq_class(1, 2)));
    reversal_biased.add(check_reversal(shape, mpq_class(1, 3)));
    if (shape.edge_count() <= 9) relabel.add(check_relabeling(shape));
    mcd.add(check_mcdiarmid(shape));
    forced.add(check_forced_third_avoidance(shape));
  }
  for (Collector* c : {&complement, &reversal_half, &reversal_biased, &relabel, &mcd, &forced}) {
    report.checks.push_back(c->finish("shapes"));
  }
  return report;
}

std::string verify_text(const VerifyReport& report) {
  std::ostringstream s;
  for (const CheckResult& c : report.checks) {
    s << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  if (!report.rows.empty()) {
    s << "\n" << rows_csv(report.rows);
  }
  s << "\n" << (report.ok() ? "verify: all checks passed" : "verify: " +
                                                               std::to_string(report.failures()) +
                                                               " check(s) failed")
    << "\n";
  return s.str();
}

std::string verify_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  nlohmann::json doc = nlohmann::json::parse(rows_json(report.rows));
  doc["checks"] = checks;
  doc["ok"] = report.ok();
  return doc.dump(2) + "\n";
}

}  // namespace bipcorr

#include "bipcorr/erratum.hpp"

#include <json.hpp>

#include <sstream>

#include "bipcorr/errors.hpp"

namespace bipcorr {

std::string printed_formula(Family family) {
  switch (family) {
    case Family::FX: return "f_X(m,n,k) = sum_l C(n,l) (2^k-1)^l / 2^{nk} f_Y(m-k,n,l)";
    case Family::FY: return "f_Y(m,n,l) = sum_k C(m-1,l) (2^k-1)^l / 2^{mk} f_X(m,n-l,k)";
    case Family::GX: return "g_X(m,n,k) = sum_l C(n,l) (2^k-1)^l / 2^{nk} g_Y(m-k,n,l)";
    case Family::GY: return "g_Y(m,n,l) = sum_k C(m-2,k) (2^l-1)^k / 2^{lm} g_X(m,n-l,k)";
    case Family::HX: return "h_X(m,n,k) = sum_l C(n-1,l) (2^k-1)^l / 2^{nk} h_Y(m-k,n,l)";
    case Family::HY: return "h_Y(m,n,l) = sum_k C(m-1,k) (2^l-1)^k / 2^{mk} h_X(m,n-l,k)";
  }
  return {};
}

std::string validated_formula(Family family) {
  switch (family) {
    case Family::FY: return "f_Y(m,n,l) = sum_k C(m-1,k) (2^l-1)^k / 2^{lm} f_X(m,n-l,k)";
    case Family::HY: return "h_Y(m,n,l) = sum_k C(m-1,k) (2^l-1)^k / 2^{lm} h_X(m,n-l,k)";
    default: return printed_formula(family);
  }
}

bool ErratumReport::validated_all_match() const {
  for (const FamilySummary& s : summary) {
    if (s.mode == Mode::Validated && s.matches != s.keys) return false;
  }
  return true;
}

const ErratumRow* ErratumReport::find(const MemoKey& key, Mode mode) const {
  for (const ErratumRow& r : rows) {
    if (r.key == key && r.mode == mode) return &r;
  }
  return nullptr;
}

const FamilySummary& ErratumReport::summary_for(Family family, Mode mode) const {
  for (const FamilySummary& s : summary) {
    if (s.family == family && s.mode == mode) return s;
  }
  throw InvalidArgument("no summary for family " + std::string(family_name(family)));
}

namespace {

// P(L -/-> b, b -/-> a) with L = Y_1..Y_l.
AvoidanceEvent literal_hy_event(const GraphShape& shape, unsigned l) {
  std::vector<Atom> atoms;
  for (unsigned j = 0; j < l; ++j) atoms.push_back({y_vertex(1 + j), x_vertex(1)});
  atoms.push_back({x_vertex(1), x_vertex(0)});
  return AvoidanceEvent(shape, std::move(atoms));
}

std::string key_args(const MemoKey& k) {
  return "(" + std::to_string(k.m) + "," + std::to_string(k.n) + "," + std::to_string(k.size) + ")";
}

void write_findings(ErratumReport& r) {
  for (Family f : kAllFamilies) {
    const FamilySummary& v = r.summary_for(f, Mode::Validated);
    std::ostringstream line;
    line << family_name(f) << " validated: ";
    if (v.matches == v.keys) {
      line << "matches enumeration on all " << v.keys << " keys.";
    } else {
      line << "MISMATCH on " << (v.keys - v.matches) << " of " << v.keys << " keys, first at "
           << to_string(*v.first_mismatch) << ".";
    }
    r.findings.push_back(line.str());
  }
  for (Family f : kAllFamilies) {
    const FamilySummary& p = r.summary_for(f, Mode::AsPrinted);
    std::ostringstream line;
    line << family_name(f) << " printed: ";
    if (p.matches == p.keys) {
      line << "matches enumeration on all " << p.keys << " keys.";
      r.findings.push_back(line.str());
      continue;
    }
    const ErratumRow* first = r.find(*p.first_mismatch, Mode::AsPrinted);
    line << "disagrees with enumeration on " << (p.keys - p.matches) << " of " << p.keys
         << " keys; first at " << family_name(f) << key_args(first->key) << ": printed "
         << first->value.to_string() << ", enumeration " << first->oracle.to_string() << ". ";
    if (p.one_step_matches == p.keys) {
      line << "A single printed step over validated children is exact on every key, so the "
              "disagreement is inherited from another family.";
    } else {
      line << "A single printed step over validated children is wrong on "
           << (p.keys - p.one_step_matches) << " keys, so the step formula itself is at fault. "
           << "Printed: " << printed_formula(f) << ". Peeling gives: " << validated_formula(f)
           << ".";
    }
    r.findings.push_back(line.str());
  }
  auto pair_triple_line = [&](std::string_view fam, const std::vector<PairTripleRow>& rows) {
    std::size_t equal = 0;
    for (const PairTripleRow& row : rows) equal += row.pair == row.triple;
    std::ostringstream line;
    line << fam << " pair vs triple: the two-atom event and the event with {K -/-> a} added "
         << (equal == rows.size() ? "coincide" : "differ") << " (" << equal << " of " << rows.size()
         << " keys equal).";
    r.findings.push_back(line.str());
  };
  pair_triple_line("GX", r.gx_pair_triple);
  pair_triple_line("HX", r.hx_pair_triple);

  std::size_t intended = 0, literal_tested = 0, literal = 0;
  for (const HyCandidateRow& row : r.hy_candidates) {
    intended += row.validated == row.intended;
    if (row.literal_definition) {
      ++literal_tested;
      literal += row.validated == *row.literal_definition;
    }
  }
  std::ostringstream line;
  line << "HY event: validated values equal P(L -/-> d, d -/-> a) on " << intended << " of "
       << r.hy_candidates.size() << " keys and P(L -/-> b, b -/-> a) on " << literal << " of "
       << literal_tested << " keys with m >= 2; ";
  if (intended == r.hy_candidates.size() && literal < literal_tested) {
    line << "the system computes the d-based event.";
  } else if (intended == r.hy_candidates.size()) {
    line << "the two candidates are indistinguishable in this range.";
  } else {
    line << "neither candidate is fully confirmed.";
  }
  r.findings.push_back(line.str());
}

}  // namespace

ErratumReport erratum_report(unsigned max_mn, const EnumerationOptions& options) {
  check_enumeration_cap(GraphShape(1, std::max(1u, max_mn)), options);
  const EnumerationOptions& opts = options;

  ErratumReport report;
  report.max_mn = max_mn;
  RecursionEngine validated(Mode::Validated, Backend::ExactDyadic);
  RecursionEngine printed(Mode::AsPrinted, Backend::ExactDyadic);

  for (Family f : kAllFamilies) {
    for (Mode mode : {Mode::AsPrinted, Mode::Validated}) {
      report.summary.push_back({f, mode, 0, 0, 0, std::nullopt});
    }
  }
  auto summary_slot = [&](Family f, Mode mode) -> FamilySummary& {
    for (FamilySummary& s : report.summary) {
      if (s.family == f && s.mode == mode) return s;
    }
    throw std::logic_error("missing summary slot");
  };

  for (unsigned m = 1; m <= max_mn; ++m) {
    for (unsigned n = 1; m * n <= max_mn; ++n) {
      const GraphShape shape(m, n);
      std::vector<MemoKey> keys;
      for (Family f : kAllFamilies) {
        const auto hi = max_size(f, m, n);
        if (!hi) continue;
        for (unsigned s = 0; s <= *hi; ++s) keys.push_back({f, m, n, s});
      }
      // Slots: defining events, then triples, then literal HY events.
      std::vector<AvoidanceEvent> events;
      std::vector<std::optional<std::size_t>> def_slot(keys.size()), triple_slot(keys.size()),
          literal_slot(keys.size());
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (auto e = defining_event(keys[i])) {
          def_slot[i] = events.size();
          events.push_back(std::move(*e));
        }
        if (auto e = triple_event(keys[i])) {
          triple_slot[i] = events.size();
          events.push_back(std::move(*e));
        }
        if (keys[i].family == Family::HY && m >= 2) {
          literal_slot[i] = events.size();
          events.push_back(literal_hy_event(shape, keys[i].size));
        }
      }
      const std::vector<EventTally> tallies = tally_events(shape, events, opts);
      auto prob = [&](std::optional<std::size_t> slot) {
        return slot ? tallies[*slot].uniform() : Dyadic::one();
      };

      for (std::size_t i = 0; i < keys.size(); ++i) {
        const MemoKey& key = keys[i];
        const Dyadic oracle = prob(def_slot[i]);
        const Dyadic v = *validated.eval(key).exact;
        const Dyadic pv = *printed.eval(key).exact;

        ErratumRow prow{key, Mode::AsPrinted, pv, oracle, pv == oracle, std::nullopt, false};
        prow.one_step = printed.printed_step_over_validated(key);
        prow.one_step_match = *prow.one_step == oracle;
        ErratumRow vrow{key, Mode::Validated, v, oracle, v == oracle, std::nullopt, false};

        for (const ErratumRow* row : {&prow, &vrow}) {
          FamilySummary& s = summary_slot(key.family, row->mode);
          ++s.keys;
          s.matches += row->match;
          if (row->mode == Mode::AsPrinted) s.one_step_matches += row->one_step_match;
          if (!row->match && !s.first_mismatch) s.first_mismatch = key;
        }
        report.rows.push_back(std::move(prow));
        report.rows.push_back(std::move(vrow));

        if (triple_slot[i]) {
          PairTripleRow pt{key, oracle, prob(triple_slot[i])};
          (key.family == Family::GX ? report.gx_pair_triple : report.hx_pair_triple).push_back(pt);
        }
        if (key.family == Family::HY) {
          HyCandidateRow hy{key, v, oracle, std::nullopt};
          if (literal_slot[i]) hy.literal_definition = prob(literal_slot[i]);
          report.hy_candidates.push_back(std::move(hy));
        }
      }
    }
  }
  write_findings(report);
  return report;
}

std::string erratum_json(const ErratumReport& r) {
  using nlohmann::json;
  auto key_json = [](const MemoKey& k) {
    return json{{"family", family_name(k.family)}, {"m", k.m}, {"n", k.n}, {"size", k.size}};
  };
  json doc;
  doc["schema_version"] = 1;
  doc["max_mn"] = r.max_mn;
  json formulas = json::object();
  for (Family f : kAllFamilies) {
    formulas[std::string(family_name(f))] = {{"printed", printed_formula(f)},
                                              {"validated", validated_formula(f)}};
  }
  doc["formulas"] = formulas;
  json summary = json::array();
  for (const FamilySummary& s : r.summary) {
    json e{{"family", family_name(s.family)}, {"mode", mode_name(s.mode)}, {"keys", s.keys},
           {"matches", s.matches}};
    if (s.mode == Mode::AsPrinted) e["one_step_matches"] = s.one_step_matches;
    e["first_mismatch"] = s.first_mismatch ? key_json(*s.first_mismatch) : json(nullptr);
    summary.push_back(std::move(e));
  }
  doc["summary"] = summary;
  json rows = json::array();
  for (const ErratumRow& row : r.rows) {
    json e = key_json(row.key);
    e["mode"] = mode_name(row.mode);
    e["value"] = row.value.to_string();
    e["oracle"] = row.oracle.to_string();
    e["match"] = row.match;
    if (row.one_step) {
      e["one_step"] = row.one_step->to_string();
      e["one_step_match"] = row.one_step_match;
    }
    rows.push_back(std::move(e));
  }
  doc["rows"] = rows;
  auto pair_triple = [&](const std::vector<PairTripleRow>& v) {
    json a = json::array();
    for (const PairTripleRow& row : v) {
      json e = key_json(row.key);
      e["pair"] = row.pair.to_string();
      e["triple"] = row.triple.to_string();
      e["equal"] = row.pair == row.triple;
      a.push_back(std::move(e));
    }
    return a;
  };
  doc["gx_pair_vs_triple"] = pair_triple(r.gx_pair_triple);
  doc["hx_pair_vs_triple"] = pair_triple(r.hx_pair_triple);
  json hy = json::array();
  for (const HyCandidateRow& row : r.hy_candidates) {
    json e = key_json(row.key);
    e["validated"] = row.validated.to_string();
    e["intended_event"] = row.intended.to_string();
    e["literal_event"] =
        row.literal_definition ? json(row.literal_definition->to_string()) : json(nullptr);
    hy.push_back(std::move(e));
  }
  doc["hy_resolution"] = hy;
  doc["findings"] = r.findings;
  return doc.dump(2) + "\n";
}

std::string erratum_text(const ErratumReport& r) {
  std::ostringstream out;
  out << "Recursion erratum report, all keys with m*n <= " << r.max_mn << "\n\n";
  out << "Findings\n";
  for (const std::string& f : r.findings) out << "  - " << f << "\n";
  out << "\nSummary (keys / exact matches / one-step matches)\n";
  for (const FamilySummary& s : r.summary) {
    out << "  " << family_name(s.family) << " " << mode_name(s.mode) << ": " << s.keys << " / "
        << s.matches;
    if (s.mode == Mode::AsPrinted) out << " / " << s.one_step_matches;
    out << "\n";
  }
  out << "\nMismatching rows\n";
  for (const ErratumRow& row : r.rows) {
    if (row.match) continue;
    out << "  " << mode_name(row.mode) << " " << to_string(row.key) << ": value "
        << row.value.to_string() << ", enumeration " << row.oracle.to_string();
    if (row.one_step) out << ", one step " << row.one_step->to_string();
    out << "\n";
  }
  auto pair_triple = [&](std::string_view title, const std::vector<PairTripleRow>& v) {
    out << "\n" << title << " pair vs triple\n";
    for (const PairTripleRow& row : v) {
      out << "  " << to_string(row.key) << ": " << row.pair.to_string() << " "
          << (row.pair == row.triple ? "==" : "!=") << " " << row.triple.to_string() << "\n";
    }
  };
  pair_triple("GX", r.gx_pair_triple);
  pair_triple("HX", r.hx_pair_triple);
  out << "\nHY candidates (validated, P(L-/->d,d-/->a), P(L-/->b,b-/->a))\n";
  for (const HyCandidateRow& row : r.hy_candidates) {
    out << "  " << to_string(row.key) << ": " << row.validated.to_string() << ", "
        << row.intended.to_string() << ", "
        << (row.literal_definition ? row.literal_definition->to_string() : std::string("n/a"))
        << "\n";
  }
  return out.str();
}

}  // namespace bipcorr

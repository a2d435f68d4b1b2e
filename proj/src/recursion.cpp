#include "bipcorr/recursion.hpp"

#include <algorithm>
#include <cmath>

#include "bipcorr/errors.hpp"

namespace bipcorr {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::FX: return "FX";
    case Family::FY: return "FY";
    case Family::GX: return "GX";
    case Family::GY: return "GY";
    case Family::HX: return "HX";
    case Family::HY: return "HY";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view mode_name(Mode m) { return m == Mode::AsPrinted ? "printed" : "validated"; }

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "printed") return Mode::AsPrinted;
  if (name == "validated") return Mode::Validated;
  return std::nullopt;
}

std::string_view backend_name(Backend b) { return b == Backend::ExactDyadic ? "exact" : "bigfloat"; }

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "exact") return Backend::ExactDyadic;
  if (name == "bigfloat") return Backend::BigFloat;
  return std::nullopt;
}

std::optional<unsigned> max_size(Family family, unsigned m, unsigned n) {
  switch (family) {
    case Family::FX: if (m >= 1) return m - 1; break;
    case Family::FY: if (m >= 1) return n; break;
    case Family::GX: if (m >= 2) return m - 2; break;
    case Family::GY: if (m >= 2) return n; break;
    case Family::HX: if (m >= 1 && n >= 1) return m - 1; break;
    case Family::HY: if (m >= 1 && n >= 1) return n - 1; break;
  }
  return std::nullopt;
}

bool in_bounds(const MemoKey& key) {
  const auto hi = max_size(key.family, key.m, key.n);
  return hi && key.size <= *hi;
}

std::string to_string(const MemoKey& key) {
  return std::string(family_name(key.family)) + "(" + std::to_string(key.m) + "," +
         std::to_string(key.n) + "," + std::to_string(key.size) + ")";
}

namespace {

void require_in_bounds(const MemoKey& key) {
  if (!in_bounds(key)) {
    throw InvalidArgument("recursion key " + to_string(key) + " is out of bounds");
  }
}

}  // namespace

std::optional<AvoidanceEvent> defining_event(const MemoKey& key) {
  require_in_bounds(key);
  if (key.m == 0 || key.n == 0) {
    throw InvalidArgument("defining events need a non-empty shape: " + to_string(key));
  }
  const GraphShape shape(key.m, key.n);
  const Vertex a = x_vertex(0), b = x_vertex(1), d = y_vertex(0);
  std::vector<Atom> atoms;
  switch (key.family) {
    case Family::FX:
      for (unsigned i = 0; i < key.size; ++i) atoms.push_back({x_vertex(1 + i), a});
      break;
    case Family::FY:
      for (unsigned j = 0; j < key.size; ++j) atoms.push_back({y_vertex(j), a});
      break;
    case Family::GX:
      for (unsigned i = 0; i < key.size; ++i) atoms.push_back({x_vertex(2 + i), b});
      atoms.push_back({b, a});
      break;
    case Family::GY:
      for (unsigned j = 0; j < key.size; ++j) atoms.push_back({y_vertex(j), b});
      atoms.push_back({b, a});
      break;
    case Family::HX:
      for (unsigned i = 0; i < key.size; ++i) atoms.push_back({x_vertex(1 + i), d});
      atoms.push_back({d, a});
      break;
    case Family::HY:
      for (unsigned j = 0; j < key.size; ++j) atoms.push_back({y_vertex(1 + j), d});
      atoms.push_back({d, a});
      break;
  }
  if (atoms.empty()) return std::nullopt;
  return AvoidanceEvent(shape, std::move(atoms));
}

std::optional<AvoidanceEvent> triple_event(const MemoKey& key) {
  if ((key.family != Family::GX && key.family != Family::HX) || key.size == 0) {
    return std::nullopt;
  }
  const GraphShape shape(key.m, key.n);
  AvoidanceEvent e = *defining_event(key);
  const unsigned first = key.family == Family::GX ? 2 : 1;
  for (unsigned i = 0; i < key.size; ++i) e = e.with_atom(shape, {x_vertex(first + i), x_vertex(0)});
  return e;
}

std::uint64_t estimated_states(const MemoKey& key) {
  const std::uint64_t families =
      (key.family == Family::FX || key.family == Family::FY) ? 2 : 4;
  const std::uint64_t m = key.m, n = key.n;
  return families * (m + 1) * (n + 1) * (std::max(m, n) + 2);
}

// ---------------------------------------------------------------------------

struct RecursionEngine::Tables {
  std::vector<std::vector<mpz_class>> pascal;
  std::unordered_map<std::uint64_t, mpz_class> mersenne_powers;  // (2^a - 1)^b
  std::unordered_map<std::uint64_t, std::vector<mpz_class>> exact_rows;
  std::unordered_map<std::uint64_t, std::vector<BigInterval>> float_rows;
  std::unordered_map<std::uint64_t, Dyadic> exact;
  std::unordered_map<std::uint64_t, BigInterval> approx;
  std::unique_ptr<RecursionEngine> validated_helper;

  const mpz_class& binomial(unsigned n, unsigned k) {
    static const mpz_class zero = 0;
    if (k > n) return zero;
    while (pascal.size() <= n) {
      const std::size_t r = pascal.size();
      std::vector<mpz_class> row(r + 1, 1);
      for (std::size_t c = 1; c < r; ++c) row[c] = pascal[r - 1][c - 1] + pascal[r - 1][c];
      pascal.push_back(std::move(row));
    }
    return pascal[n][k];
  }

  const mpz_class& mersenne_power(unsigned a, unsigned b) {
    const std::uint64_t id = (std::uint64_t{a} << 32) | b;
    auto it = mersenne_powers.find(id);
    if (it != mersenne_powers.end()) return it->second;
    mpz_class base = 1;
    mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), a);
    base -= 1;
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), b);
    return mersenne_powers.emplace(id, std::move(out)).first->second;
  }

  /// C(N, j) (2^s - 1)^j for j = 0..N.
  const std::vector<mpz_class>& weight_row(unsigned N, unsigned s) {
    const std::uint64_t id = (std::uint64_t{N} << 32) | s;
    auto it = exact_rows.find(id);
    if (it != exact_rows.end()) return it->second;
    std::vector<mpz_class> row(N + 1);
    mpz_class base = 1;
    mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), s);
    base -= 1;
    mpz_class power = 1;
    for (unsigned j = 0; j <= N; ++j) {
      row[j] = binomial(N, j) * power;
      power *= base;
    }
    return exact_rows.emplace(id, std::move(row)).first->second;
  }

  const std::vector<BigInterval>& float_row(unsigned N, unsigned s, mpfr_prec_t precision) {
    const std::uint64_t id = (std::uint64_t{N} << 32) | s;
    auto it = float_rows.find(id);
    if (it != float_rows.end()) return it->second;
    std::vector<BigInterval> row;
    row.reserve(N + 1);
    mpz_class base = 1;
    mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), s);
    base -= 1;
    mpz_class power = 1;
    for (unsigned j = 0; j <= N; ++j) {
      row.push_back(BigInterval::from_mpz(binomial(N, j) * power, precision));
      power *= base;
    }
    return float_rows.emplace(id, std::move(row)).first->second;
  }
};

namespace {

std::uint64_t pack(Family f, unsigned m, unsigned n, unsigned s) {
  return (std::uint64_t(f) << 60) | (std::uint64_t(m) << 40) | (std::uint64_t(n) << 20) | s;
}

struct ExactPolicy {
  using Value = Dyadic;
  std::unordered_map<std::uint64_t, Dyadic>& memo;

  Value zero() const { return Dyadic::zero(); }
  Value one() const { return Dyadic::one(); }
  Value negate(const Value& v) const { return -v; }

  void add(Value& sum, const mpz_class& coefficient, const Value& child, unsigned long shift) const {
    if (coefficient == 0 || child.is_zero()) return;
    sum += Dyadic(coefficient * child.numerator(), child.exponent() + shift);
  }

  // 2^{-shift} * sum_j C(N,j) (2^s-1)^j child(j), accumulated over a common
  // exponent.
  template <class Child>
  Value sum_row(RecursionEngine::Tables& t, unsigned N, unsigned s, unsigned long shift,
                Child&& child) const {
    const std::vector<mpz_class>& w = t.weight_row(N, s);
    std::uint64_t top = 0;
    for (unsigned j = 0; j <= N; ++j) top = std::max(top, child(j).exponent());
    mpz_class acc = 0, term;
    for (unsigned j = 0; j <= N; ++j) {
      const Dyadic& c = child(j);
      if (c.is_zero()) continue;
      term = w[j] * c.numerator();
      mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), top - c.exponent());
      acc += term;
    }
    return Dyadic(std::move(acc), top + shift);
  }
};

struct FloatPolicy {
  using Value = BigInterval;
  std::unordered_map<std::uint64_t, BigInterval>& memo;
  mpfr_prec_t precision;

  Value zero() const { return BigInterval(precision); }
  Value one() const { return BigInterval::from_integer(1, precision); }
  Value negate(const Value& v) const { return v.negated(); }

  void add(Value& sum, const mpz_class& coefficient, const Value& child, unsigned long shift) const {
    if (coefficient == 0) return;
    sum.add_scaled_product(coefficient, child, shift);
  }

  template <class Child>
  Value sum_row(RecursionEngine::Tables& t, unsigned N, unsigned s, unsigned long shift,
                Child&& child) const {
    const std::vector<BigInterval>& w = t.float_row(N, s, precision);
    Value sum = zero();
    for (unsigned j = 0; j <= N; ++j) sum.add_product(w[j], child(j));
    sum.scale_down(shift);
    return sum;
  }
};

// One application of the recursion for (f, m, n, s) with s >= 1. `child`
// returns the value of a smaller key.
template <class P, class Child>
typename P::Value step(const P& pol, RecursionEngine::Tables& t, Mode mode, Family f, unsigned m,
                       unsigned n, unsigned s, Child&& child) {
  switch (f) {
    case Family::FX:
    case Family::GX: {
      // Peel K: each Y vertex is an out-neighbour of K w.p. 1 - 2^{-k}.
      const Family next = f == Family::FX ? Family::FY : Family::GY;
      return pol.sum_row(t, n, s, std::uint64_t{n} * s,
                         [&](unsigned l) -> decltype(auto) { return child(next, m - s, n, l); });
    }
    case Family::HX:
      // d must not be an out-neighbour of K.
      return pol.sum_row(t, n - 1, s, std::uint64_t{n} * s,
                         [&](unsigned l) -> decltype(auto) { return child(Family::HY, m - s, n, l); });
    case Family::FY:
      if (mode == Mode::AsPrinted) {
        typename P::Value sum = pol.zero();
        for (unsigned k = 0; k + 1 <= m; ++k) {
          pol.add(sum, t.binomial(m - 1, s) * t.mersenne_power(k, s), child(Family::FX, m, n - s, k),
                  std::uint64_t{m} * k);
        }
        return sum;
      }
      return pol.sum_row(t, m - 1, s, std::uint64_t{s} * m,
                         [&](unsigned k) -> decltype(auto) { return child(Family::FX, m, n - s, k); });
    case Family::GY:
      // Neither a nor b may be out-neighbours of L (a would force b -> a).
      return pol.sum_row(t, m - 2, s, std::uint64_t{s} * m,
                         [&](unsigned k) -> decltype(auto) { return child(Family::GX, m, n - s, k); });
    case Family::HY:
      if (mode == Mode::AsPrinted) {
        typename P::Value sum = pol.zero();
        for (unsigned k = 0; k + 1 <= m; ++k) {
          pol.add(sum, t.binomial(m - 1, k) * t.mersenne_power(s, k), child(Family::HX, m, n - s, k),
                  std::uint64_t{m} * k);
        }
        return sum;
      }
      return pol.sum_row(t, m - 1, s, std::uint64_t{s} * m,
                         [&](unsigned k) -> decltype(auto) { return child(Family::HX, m, n - s, k); });
  }
  return pol.zero();
}

template <class P>
const typename P::Value& compute(const P& pol, RecursionEngine::Tables& t, Mode mode, Fault fault,
                                 Family f, unsigned m, unsigned n, unsigned s) {
  const std::uint64_t id = pack(f, m, n, s);
  if (auto it = pol.memo.find(id); it != pol.memo.end()) return it->second;

  auto child = [&](Family cf, unsigned cm, unsigned cn, unsigned cs) -> const typename P::Value& {
    return compute(pol, t, mode, fault, cf, cm, cn, cs);
  };
  typename P::Value v = pol.zero();
  if (s == 0) {
    switch (f) {
      case Family::FX:
      case Family::FY: v = pol.one(); break;
      case Family::GX:
      case Family::GY: v = child(Family::FX, m, n, 1); break;
      case Family::HX:
      case Family::HY: v = child(Family::FY, m, n, 1); break;
    }
  } else {
    v = step(pol, t, mode, f, m, n, s, child);
    if (fault == Fault::NegateGY && f == Family::GY) v = pol.negate(v);
  }
  return pol.memo.emplace(id, std::move(v)).first->second;
}

}  // namespace

RecursionEngine::RecursionEngine(Mode mode, Backend backend, EngineOptions options)
    : mode_(mode), backend_(backend), options_(options), tables_(std::make_unique<Tables>()) {
  if (options_.mantissa_bits != 0) {
    precision_ = std::max<mpfr_prec_t>(MPFR_PREC_MIN, options_.mantissa_bits);
  }
}

RecursionEngine::~RecursionEngine() = default;
RecursionEngine::RecursionEngine(RecursionEngine&&) noexcept = default;
RecursionEngine& RecursionEngine::operator=(RecursionEngine&&) noexcept = default;

std::size_t RecursionEngine::memo_size() const {
  return backend_ == Backend::ExactDyadic ? tables_->exact.size() : tables_->approx.size();
}

RecurValue RecursionEngine::eval(const MemoKey& key) {
  require_in_bounds(key);
  const std::uint64_t states = estimated_states(key);
  if (states > options_.state_budget) {
    throw BudgetExceeded("recursion key " + to_string(key) + " needs about " +
                         std::to_string(states) + " memo states, above the budget of " +
                         std::to_string(options_.state_budget) +
                         "; raise --state-budget or use Monte Carlo for a rough estimate");
  }
  RecurValue out;
  if (backend_ == Backend::ExactDyadic) {
    const ExactPolicy pol{tables_->exact};
    out.exact = compute(pol, *tables_, mode_, options_.fault, key.family, key.m, key.n, key.size);
  } else {
    if (precision_ == 0) {
      precision_ = std::max<mpfr_prec_t>(64, 4 * static_cast<mpfr_prec_t>(std::max(key.m, key.n)));
    }
    const FloatPolicy pol{tables_->approx, precision_};
    out.approx = compute(pol, *tables_, mode_, options_.fault, key.family, key.m, key.n, key.size);
    if (options_.max_relative_error && out.approx->relative_error() > *options_.max_relative_error) {
      throw PrecisionFailure("relative error bound " + std::to_string(out.approx->relative_error()) +
                             " for " + to_string(key) + " exceeds tolerance " +
                             std::to_string(*options_.max_relative_error) + " at " +
                             std::to_string(precision_) + " mantissa bits");
    }
  }
  return out;
}

Dyadic RecursionEngine::printed_step_over_validated(const MemoKey& key) {
  require_in_bounds(key);
  if (!tables_->validated_helper) {
    tables_->validated_helper =
        std::make_unique<RecursionEngine>(Mode::Validated, Backend::ExactDyadic, options_);
  }
  RecursionEngine& helper = *tables_->validated_helper;
  if (key.size == 0) return *helper.eval(key).exact;
  const ExactPolicy pol{helper.tables_->exact};
  auto child = [&](Family cf, unsigned cm, unsigned cn, unsigned cs) -> const Dyadic& {
    return compute(pol, *helper.tables_, Mode::Validated, Fault::None, cf, cm, cn, cs);
  };
  return step(pol, *tables_, Mode::AsPrinted, key.family, key.m, key.n, key.size, child);
}

RecurValue recur_eval(const MemoKey& key, Mode mode, Backend backend, const EngineOptions& options) {
  RecursionEngine engine(mode, backend, options);
  return engine.eval(key);
}

RecurValue single_pair_prob(RecursionEngine& engine, unsigned m, unsigned n, PairKind kind) {
  if (kind == PairKind::XtoX && m < 2) throw InvalidArgument("P(b -/-> a) needs m >= 2");
  if (kind == PairKind::YtoX && (m < 1 || n < 1)) throw InvalidArgument("P(d -/-> a) needs m, n >= 1");
  return engine.eval({kind == PairKind::XtoX ? Family::FX : Family::FY, m, n, 1});
}

RecurValue joint_prob(RecursionEngine& engine, unsigned m, unsigned n, PlacementKind placement) {
  if (!placement_fits(GraphShape(std::max(m, 1u), std::max(n, 1u)), placement) || n < 1) {
    throw InvalidArgument("placement " + std::string(placement_name(placement)) +
                          " does not fit K_{" + std::to_string(m) + "," + std::to_string(n) + "}");
  }
  switch (placement) {
    case PlacementKind::AllInX: return engine.eval({Family::GX, m, n, 1});
    case PlacementKind::XXY: return engine.eval({Family::GY, m, n, 1});
    case PlacementKind::XYX: return engine.eval({Family::HX, m, n, 1});
  }
  throw InvalidArgument("unknown placement");
}

RcRecursionResult rc_recursion(RecursionEngine& engine, unsigned m, unsigned n,
                               PlacementKind placement) {
  if (engine.mode() != Mode::Validated) {
    throw InvalidArgument("relative covariance is only defined for the validated system");
  }
  const RecurValue joint = joint_prob(engine, m, n, placement);
  RecurValue first, second;
  switch (placement) {
    case PlacementKind::AllInX:
      first = second = single_pair_prob(engine, m, n, PairKind::XtoX);
      break;
    case PlacementKind::XXY:
      first = single_pair_prob(engine, m, n, PairKind::XtoX);
      second = single_pair_prob(engine, m, n, PairKind::YtoX);
      break;
    case PlacementKind::XYX:
      first = second = single_pair_prob(engine, m, n, PairKind::YtoX);
      break;
  }
  RcRecursionResult out;
  if (engine.backend() == Backend::ExactDyadic) {
    ExactRcResult r = make_rc_result(mpq_class(1, 2), first.exact->to_rational(),
                                     second.exact->to_rational(), joint.exact->to_rational());
    r.dyadic_ac = *first.exact;
    r.dyadic_bc = *second.exact;
    r.dyadic_joint = *joint.exact;
    r.dyadic_covariance = *joint.exact - *first.exact * *second.exact;
    out.exact = std::move(r);
  } else {
    BigInterval product = BigInterval::product(*first.approx, *second.approx);
    BigInterval covariance = BigInterval::difference(*joint.approx, product);
    if (!joint.approx->strictly_positive()) {
      throw PrecisionFailure("joint probability interval touches zero; raise the mantissa bits");
    }
    BigInterval rc = BigInterval::one_minus_ratio(product, *joint.approx);
    SignVerdict verdict = SignVerdict::Inconclusive;
    if (covariance.strictly_positive()) verdict = SignVerdict::Positive;
    if (covariance.strictly_negative()) verdict = SignVerdict::Negative;
    out.approx = ApproxRcResult{*first.approx, *second.approx, *joint.approx, std::move(covariance),
                                std::move(rc), verdict};
  }
  return out;
}

RcRecursionResult rc_recursion(unsigned m, unsigned n, PlacementKind placement, Backend backend,
                               const EngineOptions& options) {
  RecursionEngine engine(Mode::Validated, backend, options);
  return rc_recursion(engine, m, n, placement);
}

}  // namespace bipcorr

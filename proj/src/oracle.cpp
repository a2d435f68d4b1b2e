#include "bipcorr/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <thread>

#include "bipcorr/errors.hpp"

namespace bipcorr {

void check_enumeration_cap(const GraphShape& shape, const EnumerationOptions& options) {
  if (options.max_mn > kHardEnumerationCeiling) {
    throw InvalidArgument("enumeration cap " + std::to_string(options.max_mn) +
                          " exceeds the hard ceiling of " +
                          std::to_string(kHardEnumerationCeiling));
  }
  if (shape.edge_count() > options.max_mn) {
    throw BudgetExceeded("K_{" + std::to_string(shape.m()) + "," +
                         std::to_string(shape.n()) + "} has " +
                         std::to_string(shape.edge_count()) +
                         " edges, above the enumeration cap of " +
                         std::to_string(options.max_mn) +
                         "; use the recursion engine (exact) or Monte Carlo");
  }
}

namespace {

unsigned worker_count(const EnumerationOptions& options, std::uint64_t chunks) {
  unsigned t = options.threads ? options.threads : std::thread::hardware_concurrency();
  t = std::max(1u, t);
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(chunks, 1)));
}

// Runs `visit(orientation, flags_out)` over every index; visit writes one
// bool per slot. Returns per-slot histograms over the popcount of the index,
// laid out slot-major with (mn + 1) bins each.
template <class MakeVisitor>
std::vector<std::uint64_t> enumerate(const GraphShape& shape, std::size_t slots,
                                     const EnumerationOptions& options,
                                     MakeVisitor make_visitor) {
  check_enumeration_cap(shape, options);
  const unsigned mn = static_cast<unsigned>(shape.edge_count());
  const std::size_t bins = mn + 1;
  const std::uint64_t total = std::uint64_t{1} << mn;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk_size);
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  const unsigned workers = worker_count(options, chunks);

  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(slots * bins, 0));
  std::atomic<std::uint64_t> next{0};
  auto work = [&](unsigned w) {
    auto visit = make_visitor();
    kernel::CompactOrientation o(shape.m(), shape.n());
    std::vector<char> out(slots, 0);
    std::vector<std::uint64_t>& hist = partial[w];
    for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      const std::uint64_t end = std::min(total, (c + 1) * chunk);
      for (std::uint64_t index = c * chunk; index < end; ++index) {
        o.load_index(index);
        visit(o, out.data());
        const unsigned bin = static_cast<unsigned>(std::popcount(index));
        for (std::size_t s = 0; s < slots; ++s) hist[s * bins + bin] += out[s];
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  std::vector<std::uint64_t> merged(slots * bins, 0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < merged.size(); ++k) merged[k] += p[k];
  }
  return merged;
}

std::vector<EventTally> split_histograms(const std::vector<std::uint64_t>& hist,
                                         std::size_t slots, unsigned mn) {
  std::vector<EventTally> out;
  out.reserve(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    const auto first = hist.begin() + static_cast<std::ptrdiff_t>(s * (mn + 1));
    out.emplace_back(std::vector<std::uint64_t>(first, first + mn + 1));
  }
  return out;
}

mpq_class require_bias(const mpq_class& p) {
  if (p < 0 || p > 1) {
    throw InvalidArgument("edge bias p must lie in [0, 1], got " + rational_string(p));
  }
  return p;
}

}  // namespace

std::uint64_t EventTally::count() const {
  std::uint64_t c = 0;
  for (std::uint64_t h : by_flag_count_) c += h;
  return c;
}

DyadicProb EventTally::uniform() const { return DyadicProb(mpz_class(std::to_string(count())), edge_count()); }

mpq_class EventTally::biased(const mpq_class& p) const {
  require_bias(p);
  const unsigned mn = edge_count();
  const mpq_class q = 1 - p;
  mpq_class total = 0;
  for (unsigned k = 0; k <= mn; ++k) {
    if (by_flag_count_[k] == 0) continue;
    mpq_class term(mpz_class(std::to_string(by_flag_count_[k])));
    mpz_class num_p, den_p, num_q, den_q;
    mpz_pow_ui(num_p.get_mpz_t(), p.get_num_mpz_t(), k);
    mpz_pow_ui(den_p.get_mpz_t(), p.get_den_mpz_t(), k);
    mpz_pow_ui(num_q.get_mpz_t(), q.get_num_mpz_t(), mn - k);
    mpz_pow_ui(den_q.get_mpz_t(), q.get_den_mpz_t(), mn - k);
    mpq_class factor(num_p * num_q, den_p * den_q);
    factor.canonicalize();
    total += term * factor;
  }
  total.canonicalize();
  return total;
}

std::vector<EventTally> tally_events(const GraphShape& shape,
                                     std::span<const AvoidanceEvent> events,
                                     const EnumerationOptions& options) {
  const kernel::EventBatch prototype(shape, events);
  const std::size_t slots = events.size();
  auto hist = enumerate(shape, slots, options, [&] {
    return [batch = prototype, slots](const kernel::CompactOrientation& o, char* out) mutable {
      batch.load(o);
      for (std::size_t s = 0; s < slots; ++s) out[s] = batch.holds(s);
    };
  });
  return split_histograms(hist, slots, static_cast<unsigned>(shape.edge_count()));
}

std::uint64_t count_orientations(
    const GraphShape& shape,
    const std::function<bool(const kernel::CompactOrientation&)>& predicate,
    const EnumerationOptions& options) {
  auto hist = enumerate(shape, 1, options, [&] {
    return [&predicate](const kernel::CompactOrientation& o, char* out) { out[0] = predicate(o); };
  });
  std::uint64_t c = 0;
  for (std::uint64_t h : hist) c += h;
  return c;
}

DyadicProb exact_prob(const GraphShape& shape, const AvoidanceEvent& event,
                      const EnumerationOptions& options) {
  return tally_events(shape, std::span(&event, 1), options).front().uniform();
}

mpq_class exact_prob_biased(const GraphShape& shape, const AvoidanceEvent& event,
                            const mpq_class& p, const EnumerationOptions& options) {
  require_bias(p);
  return tally_events(shape, std::span(&event, 1), options).front().biased(p);
}

ExactRcResult make_rc_result(const mpq_class& p, const mpq_class& p_ac,
                             const mpq_class& p_bc, const mpq_class& p_joint) {
  ExactRcResult r;
  r.p = p;
  r.p_ac = p_ac;
  r.p_bc = p_bc;
  r.p_joint = p_joint;
  r.covariance = p_joint - p_ac * p_bc;
  r.covariance.canonicalize();
  r.sign = sign_of(sgn(r.covariance));
  if (p_joint != 0) {
    mpq_class rc = r.covariance / p_joint;
    rc.canonicalize();
    r.rc = rc;
  }
  return r;
}

ExactRcResult exact_rc(const GraphShape& shape, PlacementKind placement,
                       const mpq_class& p, const EnumerationOptions& options) {
  require_bias(p);
  if (!placement_fits(shape, placement)) {
    (void)placement_events(shape, placement);  // throws with the standard message
  }
  const Placement pl = canonical_placement(placement);
  auto bit = [](const kernel::ReachSet& r, Vertex v) {
    return ((v.side == Side::X ? r.x : r.y) >> v.index) & 1u;
  };
  // Slots: 0 {x-/->y}, 1 {y-/->z}, 2 both, 3 {x->y and y->z}.
  auto hist = enumerate(shape, 4, options, [&] {
    return [&](const kernel::CompactOrientation& o, char* out) {
      const kernel::ReachSet into_y = o.backward(pl.y);
      const kernel::ReachSet into_z = o.backward(pl.z);
      const bool a = bit(into_y, pl.x);
      const bool b = bit(into_z, pl.y);
      out[0] = !a;
      out[1] = !b;
      out[2] = !a && !b;
      out[3] = a && b;
    };
  });
  const auto t = split_histograms(hist, 4, static_cast<unsigned>(shape.edge_count()));
  ExactRcResult r = make_rc_result(p, t[0].biased(p), t[1].biased(p), t[2].biased(p));

  mpq_class both = t[3].biased(p);
  mpq_class uncomplemented = both - (1 - r.p_ac) * (1 - r.p_bc);
  uncomplemented.canonicalize();
  if (uncomplemented != r.covariance) {
    throw std::logic_error("covariance identity P(AB)-P(A)P(B) = P(AcBc)-P(Ac)P(Bc) failed");
  }

  if (p == mpq_class(1, 2)) {
    r.dyadic_ac = t[0].uniform();
    r.dyadic_bc = t[1].uniform();
    r.dyadic_joint = t[2].uniform();
    r.dyadic_covariance = *r.dyadic_joint - *r.dyadic_ac * *r.dyadic_bc;
  }
  return r;
}

}  // namespace bipcorr

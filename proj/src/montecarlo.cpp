#include "bipcorr/montecarlo.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "bipcorr/asymptotics.hpp"
#include "bipcorr/errors.hpp"
#include "bipcorr/philox.hpp"
#include "bipcorr/reach_kernel.hpp"

namespace bipcorr {

std::string_view ci_method_name(CiMethod m) {
  return m == CiMethod::Binomial ? "binomial" : "batch-means";
}

namespace {

constexpr double kZ95 = 1.959963984540054;

void validate(const McConfig& cfg) {
  if (cfg.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (cfg.batch_size < 1) throw InvalidArgument("batch size must be at least 1");
  if (cfg.batch_size > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("batch size must fit in 32 bits");
  }
  if (cfg.p < 0 || cfg.p > 1) {
    throw InvalidArgument("edge bias p must lie in [0, 1], got " + rational_string(cfg.p));
  }
}

// Packs the m*n edge flags of one trial, row-major, into 64-bit words.
class EdgeSampler {
 public:
  EdgeSampler(const GraphShape& shape, const McConfig& cfg)
      : edges_(shape.edge_count()), seed_(cfg.seed), reflect_(cfg.reflect_draws) {
    if (cfg.p == mpq_class(1, 2)) {
      kind_ = Kind::RawBits;
    } else if (cfg.p == 0) {
      kind_ = Kind::Never;
    } else if (cfg.p == 1) {
      kind_ = Kind::Always;
    } else {
      kind_ = Kind::Threshold;
      threshold_ = threshold(cfg.p);
    }
  }

  std::size_t words() const { return (edges_ + 63) / 64; }

  void sample(std::uint64_t batch, std::uint32_t trial, std::vector<std::uint64_t>& out) const {
    out.assign(words(), 0);
    TrialStream stream(seed_, batch, trial);
    switch (kind_) {
      case Kind::RawBits:
        for (std::size_t w = 0; w < out.size(); ++w) out[w] = stream.next() ^ (reflect_ ? ~0ull : 0);
        break;
      case Kind::Never:
      case Kind::Always: {
        const bool flag = (kind_ == Kind::Always) != reflect_;
        if (flag) std::fill(out.begin(), out.end(), ~0ull);
        break;
      }
      case Kind::Threshold:
        for (std::size_t e = 0; e < edges_; ++e) {
          std::uint64_t u = stream.next();
          if (reflect_) u = ~u;
          if (u < threshold_) out[e / 64] |= std::uint64_t{1} << (e % 64);
        }
        break;
    }
    if (edges_ % 64) out.back() &= (std::uint64_t{1} << (edges_ % 64)) - 1;
  }

 private:
  enum class Kind { RawBits, Never, Always, Threshold };

  // floor(p 2^64) for p <= 1/2, else 2^64 - floor((1-p) 2^64), so that the
  // thresholds of p and 1 - p sum to exactly 2^64.
  static std::uint64_t threshold(const mpq_class& p) {
    const bool low = p <= mpq_class(1, 2);
    const mpq_class q = low ? p : mpq_class(1 - p);
    mpz_class scaled = q.get_num() << 64;
    scaled /= q.get_den();
    static_assert(sizeof(unsigned long) == 8);
    const std::uint64_t t = scaled.get_ui();  // q <= 1/2, so t < 2^63
    return low ? t : (~t + 1);
  }

  std::size_t edges_;
  std::uint64_t seed_;
  bool reflect_;
  Kind kind_ = Kind::RawBits;
  std::uint64_t threshold_ = 0;
};

std::uint64_t bits_at(const std::vector<std::uint64_t>& words, std::size_t start, unsigned len) {
  const std::size_t w = start / 64;
  const unsigned off = start % 64;
  std::uint64_t v = words[w] >> off;
  if (off != 0 && off + len > 64) v |= words[w + 1] << (64 - off);
  return v & kernel::low_mask(len);
}

std::vector<bool> unpack(const std::vector<std::uint64_t>& words, std::size_t edges) {
  std::vector<bool> flags(edges);
  for (std::size_t e = 0; e < edges; ++e) flags[e] = (words[e / 64] >> (e % 64)) & 1u;
  return flags;
}

// Evaluates every event on one trial's orientation.
class TrialEvaluator {
 public:
  TrialEvaluator(const GraphShape& shape, std::span<const AvoidanceEvent> events)
      : shape_(shape), events_(events.begin(), events.end()) {
    if (shape.m() <= kernel::kMaxSide && shape.n() <= kernel::kMaxSide) {
      batch_.emplace(shape, events);
      compact_.emplace(shape.m(), shape.n());
      rows_.resize(shape.m());
    }
  }

  void evaluate(const std::vector<std::uint64_t>& flags, std::vector<char>& out) {
    out.resize(events_.size());
    if (batch_) {
      for (unsigned i = 0; i < shape_.m(); ++i) {
        rows_[i] = bits_at(flags, std::size_t{i} * shape_.n(), shape_.n());
      }
      compact_->load_rows(rows_);
      batch_->load(*compact_);
      for (std::size_t s = 0; s < events_.size(); ++s) out[s] = batch_->holds(s);
    } else {
      const Orientation o(shape_, unpack(flags, shape_.edge_count()));
      for (std::size_t s = 0; s < events_.size(); ++s) out[s] = event_holds(o, events_[s]);
    }
  }

 private:
  GraphShape shape_;
  std::vector<AvoidanceEvent> events_;
  std::optional<kernel::EventBatch> batch_;
  std::optional<kernel::CompactOrientation> compact_;
  std::vector<std::uint64_t> rows_;
};

std::uint64_t batch_count(const McConfig& cfg) {
  return (cfg.trials + cfg.batch_size - 1) / cfg.batch_size;
}

std::uint64_t batch_trials(const McConfig& cfg, std::uint64_t b) {
  return std::min(cfg.batch_size, cfg.trials - b * cfg.batch_size);
}

// Hit counts per batch (batch-major, one column per event).
std::vector<std::uint64_t> run_batches(const GraphShape& shape,
                                       std::span<const AvoidanceEvent> events,
                                       const McConfig& cfg) {
  validate(cfg);
  const EdgeSampler sampler(shape, cfg);
  const std::uint64_t batches = batch_count(cfg);
  const std::size_t slots = events.size();
  std::vector<std::uint64_t> counts(batches * slots, 0);

  unsigned workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, batches));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    TrialEvaluator eval(shape, events);
    std::vector<std::uint64_t> flags;
    std::vector<char> hit;
    for (std::uint64_t b = next.fetch_add(1); b < batches; b = next.fetch_add(1)) {
      const std::uint64_t t_count = batch_trials(cfg, b);
      std::uint64_t* row = counts.data() + b * slots;
      for (std::uint32_t t = 0; t < t_count; ++t) {
        sampler.sample(b, t, flags);
        eval.evaluate(flags, hit);
        for (std::size_t s = 0; s < slots; ++s) row[s] += hit[s];
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return counts;
}

}  // namespace

Estimate wilson_estimate(std::uint64_t hits, std::uint64_t trials) {
  if (trials == 0) throw InvalidArgument("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  Estimate e;
  e.mean = p;
  e.std_error = std::sqrt(p * (1 - p) / n);
  e.ci_low = std::max(0.0, std::min(p, centre - half));
  e.ci_high = std::min(1.0, std::max(p, centre + half));
  e.trials = trials;
  e.method = CiMethod::Binomial;
  return e;
}

Orientation sample_orientation(const GraphShape& shape, const McConfig& cfg, std::uint64_t batch,
                               std::uint32_t trial) {
  validate(cfg);
  std::vector<std::uint64_t> flags;
  EdgeSampler(shape, cfg).sample(batch, trial, flags);
  return Orientation(shape, unpack(flags, shape.edge_count()));
}

Estimate mc_estimate_event(const GraphShape& shape, const AvoidanceEvent& event,
                           const McConfig& cfg) {
  const auto counts = run_batches(shape, std::span(&event, 1), cfg);
  std::uint64_t hits = 0;
  for (std::uint64_t c : counts) hits += c;
  return wilson_estimate(hits, cfg.trials);
}

std::vector<bool> mc_indicator_stream(const GraphShape& shape, const AvoidanceEvent& event,
                                      const McConfig& cfg) {
  validate(cfg);
  const EdgeSampler sampler(shape, cfg);
  TrialEvaluator eval(shape, std::span(&event, 1));
  std::vector<bool> out;
  out.reserve(cfg.trials);
  std::vector<std::uint64_t> flags;
  std::vector<char> hit;
  for (std::uint64_t b = 0; b < batch_count(cfg); ++b) {
    for (std::uint32_t t = 0; t < batch_trials(cfg, b); ++t) {
      sampler.sample(b, t, flags);
      eval.evaluate(flags, hit);
      out.push_back(hit[0]);
    }
  }
  return out;
}

RcEstimate mc_estimate_rc(const GraphShape& shape, PlacementKind placement, const McConfig& cfg) {
  const PlacementEvents pe = placement_events(shape, placement);
  const std::vector<AvoidanceEvent> events{pe.not_a, pe.not_b, pe.joint};
  const auto counts = run_batches(shape, events, cfg);
  const std::uint64_t batches = batch_count(cfg);

  std::uint64_t na = 0, nb = 0, nj = 0;
  for (std::uint64_t b = 0; b < batches; ++b) {
    na += counts[3 * b];
    nb += counts[3 * b + 1];
    nj += counts[3 * b + 2];
  }
  RcEstimate r;
  r.seed = cfg.seed;
  r.p_ac = wilson_estimate(na, cfg.trials);
  r.p_bc = wilson_estimate(nb, cfg.trials);
  r.p_joint = wilson_estimate(nj, cfg.trials);

  const double ma = r.p_ac.mean, mb = r.p_bc.mean, mj = r.p_joint.mean;
  Estimate& cov = r.covariance;
  cov.mean = mj - ma * mb;
  cov.trials = cfg.trials;
  if (batches >= kMinBatchesForBatchMeans) {
    std::vector<double> per_batch(batches);
    for (std::uint64_t b = 0; b < batches; ++b) {
      const double t = static_cast<double>(batch_trials(cfg, b));
      per_batch[b] = counts[3 * b + 2] / t - (counts[3 * b] / t) * (counts[3 * b + 1] / t);
    }
    double avg = 0;
    for (double c : per_batch) avg += c;
    avg /= static_cast<double>(batches);
    double ss = 0;
    for (double c : per_batch) ss += (c - avg) * (c - avg);
    const double sd = std::sqrt(ss / static_cast<double>(batches - 1));
    cov.std_error = sd / std::sqrt(static_cast<double>(batches));
    const boost::math::students_t dist(static_cast<double>(batches - 1));
    const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
    cov.ci_low = cov.mean - tq * cov.std_error;
    cov.ci_high = cov.mean + tq * cov.std_error;
    cov.method = CiMethod::BatchMeans;
  } else {
    // Influence-function variance of E[J] - E[A] E[B] for indicators with
    // J = A B.
    const double second = mj + mb * mb * ma + ma * ma * mb - 2 * mb * mj - 2 * ma * mj +
                          2 * ma * mb * mj;
    const double centre = mj - 2 * ma * mb;
    const double var = std::max(0.0, second - centre * centre);
    cov.std_error = std::sqrt(var / static_cast<double>(cfg.trials));
    cov.ci_low = cov.mean - kZ95 * cov.std_error;
    cov.ci_high = cov.mean + kZ95 * cov.std_error;
    cov.method = CiMethod::Binomial;
    cov.fallback = true;
  }
  if (nj > 0) r.rc = cov.mean / mj;
  if (nj == 0) r.sign = SignVerdict::Inconclusive;
  else if (cov.ci_high < 0) r.sign = SignVerdict::Negative;
  else if (cov.ci_low > 0) r.sign = SignVerdict::Positive;
  else r.sign = SignVerdict::Inconclusive;
  return r;
}

FeasibilityAdvice feasibility(const GraphShape& shape, PlacementKind placement,
                              double target_rel_err, double budget) {
  if (!(target_rel_err > 0)) throw InvalidArgument("target relative error must be positive");
  (void)placement_events(shape, placement);
  const unsigned m = shape.m(), n = shape.n();
  LemmaId a = LemmaId::I, b = LemmaId::I, joint = LemmaId::IV;
  if (placement == PlacementKind::XXY) {
    b = LemmaId::II;
    joint = LemmaId::V;
  } else if (placement == PlacementKind::XYX) {
    a = b = LemmaId::II;
    joint = LemmaId::III;
  }
  FeasibilityAdvice f;
  f.p_ac = lemma_estimate(a, m, n);
  f.p_bc = lemma_estimate(b, m, n);
  f.p_joint = lemma_estimate(joint, m, n);
  f.log2_p_joint = lemma_log2_estimate(joint, m, n);
  f.trials_needed = std::exp2(-f.log2_p_joint - 2 * std::log2(target_rel_err));
  f.budget = budget;
  f.feasible = f.trials_needed <= budget;
  std::ostringstream s;
  s << "K_{" << m << "," << n << "} " << placement_name(placement) << ": predicted p_joint = 2^"
    << f.log2_p_joint << ", about " << f.trials_needed << " trials for "
    << target_rel_err * 100 << "% relative error; "
    << (f.feasible ? "feasible" : "infeasible") << " against a budget of " << budget;
  if (!f.feasible) s << "; use the recursion engine instead";
  f.summary = s.str();
  return f;
}

}  // namespace bipcorr

#pragma once

// Single-word reachability kernel for shapes with m, n <= 64. Used by the
// enumeration oracle and the Monte Carlo engine; the general-purpose
// Orientation in model.hpp is the reference it is tested against.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "bipcorr/errors.hpp"
#include "bipcorr/model.hpp"

namespace bipcorr::kernel {

inline constexpr unsigned kMaxSide = 64;

inline constexpr std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

struct ReachSet {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
};

class CompactOrientation {
 public:
  CompactOrientation(unsigned m, unsigned n) : m_(m), n_(n) {}

  unsigned m() const { return m_; }
  unsigned n() const { return n_; }

  /// Row-major flags packed into one word; requires m * n <= 63.
  void load_index(std::uint64_t index) {
    const std::uint64_t row_mask = low_mask(n_);
    for (unsigned i = 0; i < m_; ++i) {
      x_out_[i] = (index >> (i * n_)) & row_mask;
    }
    transpose();
  }

  /// Row i holds the Y-bits j with X_i -> Y_j.
  void load_rows(std::span<const std::uint64_t> rows) {
    for (unsigned i = 0; i < m_; ++i) x_out_[i] = rows[i] & low_mask(n_);
    transpose();
  }

  std::uint64_t x_row(unsigned i) const { return x_out_[i]; }
  std::uint64_t y_row(unsigned j) const { return y_out_[j]; }

  /// Everything reachable from v (v included).
  ReachSet forward(Vertex v) const {
    return expand(v, x_out_.data(), y_out_.data(), 0, 0);
  }

  /// Everything that reaches v (v included). In a complete bipartite graph the
  /// in-neighbourhood is the complement of the out-neighbourhood.
  ReachSet backward(Vertex v) const {
    return expand(v, x_out_.data(), y_out_.data(), low_mask(n_), low_mask(m_));
  }

 private:
  void transpose() {
    const std::uint64_t xm = low_mask(m_);
    for (unsigned j = 0; j < n_; ++j) y_out_[j] = 0;
    for (unsigned i = 0; i < m_; ++i) {
      const std::uint64_t inv = ~x_out_[i] & low_mask(n_);
      for (std::uint64_t bits = inv; bits; bits &= bits - 1) {
        y_out_[std::countr_zero(bits)] |= std::uint64_t{1} << i;
      }
    }
    for (unsigned j = 0; j < n_; ++j) y_out_[j] &= xm;
  }

  // flip_y / flip_x complement the rows to walk edges backwards.
  ReachSet expand(Vertex v, const std::uint64_t* xr, const std::uint64_t* yr,
                  std::uint64_t flip_y, std::uint64_t flip_x) const {
    ReachSet r;
    std::uint64_t fx = 0, fy = 0;
    if (v.side == Side::X) {
      r.x = fx = std::uint64_t{1} << v.index;
    } else {
      r.y = fy = std::uint64_t{1} << v.index;
    }
    while (fx | fy) {
      std::uint64_t ny = 0, nx = 0;
      for (std::uint64_t b = fx; b; b &= b - 1) ny |= xr[std::countr_zero(b)] ^ flip_y;
      for (std::uint64_t b = fy; b; b &= b - 1) nx |= yr[std::countr_zero(b)] ^ flip_x;
      ny &= ~r.y;
      nx &= ~r.x;
      r.y |= ny;
      r.x |= nx;
      fx = nx;
      fy = ny;
    }
    return r;
  }

  unsigned m_;
  unsigned n_;
  std::array<std::uint64_t, kMaxSide> x_out_{};
  std::array<std::uint64_t, kMaxSide> y_out_{};
};

/// A set of events compiled against shared reach computations. Each atom is
/// checked either from its source (forward) or from its target (backward);
/// the grouping with fewer distinct roots is chosen per event, and roots are
/// shared across all events of the batch.
class EventBatch {
 public:
  EventBatch(const GraphShape& shape, std::span<const AvoidanceEvent> events) {
    if (shape.m() > kMaxSide || shape.n() > kMaxSide) {
      throw InvalidArgument("compact kernel supports at most 64 vertices per side");
    }
    for (const AvoidanceEvent& e : events) {
      std::vector<Vertex> sources, targets;
      for (const Atom& a : e.atoms()) {
        sources.push_back(a.source);
        targets.push_back(a.target);
      }
      const bool backward = distinct(targets) <= distinct(sources);
      CompiledEvent ce;
      for (const Atom& a : e.atoms()) {
        const Vertex root = backward ? a.target : a.source;
        const Vertex other = backward ? a.source : a.target;
        const std::size_t slot = slot_for(root, backward);
        auto it = std::find_if(ce.checks.begin(), ce.checks.end(),
                               [&](const Check& c) { return c.slot == slot; });
        if (it == ce.checks.end()) {
          ce.checks.push_back({slot, 0, 0});
          it = ce.checks.end() - 1;
        }
        (other.side == Side::X ? it->mask_x : it->mask_y) |= std::uint64_t{1}
                                                             << other.index;
      }
      events_.push_back(std::move(ce));
    }
    reach_.resize(roots_.size());
  }

  std::size_t size() const { return events_.size(); }

  /// Computes every shared reach set for o; call before holds().
  void load(const CompactOrientation& o) {
    for (std::size_t s = 0; s < roots_.size(); ++s) {
      reach_[s] = roots_[s].backward ? o.backward(roots_[s].v) : o.forward(roots_[s].v);
    }
  }

  bool holds(std::size_t event) const {
    for (const Check& c : events_[event].checks) {
      const ReachSet& r = reach_[c.slot];
      if ((r.x & c.mask_x) | (r.y & c.mask_y)) return false;
    }
    return true;
  }

 private:
  struct Root {
    Vertex v;
    bool backward;
  };
  struct Check {
    std::size_t slot;
    std::uint64_t mask_x;
    std::uint64_t mask_y;
  };
  struct CompiledEvent {
    std::vector<Check> checks;
  };

  static std::size_t distinct(std::vector<Vertex> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  }

  std::size_t slot_for(Vertex v, bool backward) {
    for (std::size_t s = 0; s < roots_.size(); ++s) {
      if (roots_[s].v == v && roots_[s].backward == backward) return s;
    }
    roots_.push_back({v, backward});
    return roots_.size() - 1;
  }

  std::vector<Root> roots_;
  std::vector<CompiledEvent> events_;
  std::vector<ReachSet> reach_;
};

}  // namespace bipcorr::kernel

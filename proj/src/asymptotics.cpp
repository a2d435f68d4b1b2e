#include "bipcorr/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bipcorr/errors.hpp"

namespace bipcorr {

std::string_view lemma_name(LemmaId id) {
  switch (id) {
    case LemmaId::I: return "I";
    case LemmaId::II: return "II";
    case LemmaId::III: return "III";
    case LemmaId::IV: return "IV";
    case LemmaId::V: return "V";
  }
  return "?";
}

namespace {

void require_sizes(unsigned m, unsigned n) {
  if (m < 2 || n < 2) {
    throw InvalidArgument("lemma estimates need m, n >= 2, got (" + std::to_string(m) + ", " +
                          std::to_string(n) + ")");
  }
}

// log2(a * 2^x + b * 2^y) for a, b >= 0 (not both zero).
double log2_sum(double a, double x, double b, double y) {
  if (a == 0) return std::log2(b) + y;
  if (b == 0) return std::log2(a) + x;
  const double la = std::log2(a) + x, lb = std::log2(b) + y;
  const double hi = std::max(la, lb), lo = std::min(la, lb);
  return hi + std::log2(1 + std::exp2(lo - hi));
}

// (coefficient, exponent) pairs: estimate = c1 2^{e1} + c2 2^{e2}.
struct TwoTerm {
  double c1, e1, c2, e2;
};

TwoTerm terms(LemmaId id, unsigned m, unsigned n) {
  const double M = m, N = n;
  switch (id) {
    case LemmaId::I: return {2, -N, 0, 0};
    case LemmaId::II: return {1, -M, 1, -N};
    case LemmaId::III: return {2, -(M + N - 1), 1, -2 * N};
    case LemmaId::IV: return {3, -2 * N, 0, 0};
    case LemmaId::V: return {1, -(M + N - 2), 1, -2 * N};
  }
  return {0, 0, 0, 0};
}

}  // namespace

double lemma_estimate(LemmaId id, unsigned m, unsigned n) {
  require_sizes(m, n);
  const TwoTerm t = terms(id, m, n);
  return t.c1 * std::exp2(t.e1) + t.c2 * std::exp2(t.e2);
}

double lemma_log2_estimate(LemmaId id, unsigned m, unsigned n) {
  require_sizes(m, n);
  const TwoTerm t = terms(id, m, n);
  return log2_sum(t.c1, t.e1, t.c2, t.e2);
}

mpq_class rc_limit(PlacementKind kind, BetaClass beta) {
  switch (kind) {
    case PlacementKind::AllInX: return mpq_class(-1, 3);
    case PlacementKind::XXY:
      switch (beta) {
        case BetaClass::LessThanOne: return mpq_class(1, 2);
        case BetaClass::EqualOne: return mpq_class(1, 5);
        case BetaClass::GreaterThanOne: return mpq_class(-1);
      }
      break;
    case PlacementKind::XYX:
      switch (beta) {
        case BetaClass::LessThanOne: return mpq_class(1);
        case BetaClass::EqualOne: return mpq_class(1, 5);
        case BetaClass::GreaterThanOne: return mpq_class(0);
      }
      break;
  }
  throw InvalidArgument("unknown placement or beta class");
}

double rc_finite_estimate(PlacementKind kind, unsigned m, unsigned n) {
  require_sizes(m, n);
  const int gap = static_cast<int>(n) - static_cast<int>(m);
  switch (kind) {
    case PlacementKind::AllInX:
      // (2 * 2^{-n})^2 / (3 * 2^{-2n})
      return 1.0 - 4.0 / 3.0;
    case PlacementKind::XXY: {
      // Scaled by 2^{m+n}: 2(1 + u) / (4 + u) with u = 2^{m-n}.
      const double u = std::exp2(-gap);
      if (std::isinf(u)) return -1.0;
      const double ratio = u > 1 ? 2 * (1 / u + 1) / (4 / u + 1) : 2 * (1 + u) / (4 + u);
      return 1.0 - ratio;
    }
    case PlacementKind::XYX: {
      // Scaled by 2^{2n}: (v + 1)^2 / (4v + 1) with v = 2^{n-m}.
      const double v = std::exp2(gap);
      if (std::isinf(v)) return -std::numeric_limits<double>::infinity();
      return 1.0 - (v + 1) * ((v + 1) / (4 * v + 1));
    }
  }
  throw InvalidArgument("unknown placement");
}

double xxy_quoted_closed_form(int gap) {
  const double t = std::exp2(-gap);
  return 1.0 - 2 * (1 - t) / (4 + t);
}

ComposedLimit composed_limit(PlacementKind kind, BetaClass beta) {
  switch (kind) {
    case PlacementKind::AllInX: return {mpq_class(-1, 3)};
    case PlacementKind::XXY:
      // u = 2^{m-n} tends to 0, stays 1, or grows without bound.
      switch (beta) {
        case BetaClass::LessThanOne: return {mpq_class(1, 2)};
        case BetaClass::EqualOne: return {mpq_class(1, 5)};
        case BetaClass::GreaterThanOne: return {mpq_class(-1)};
      }
      break;
    case PlacementKind::XYX:
      switch (beta) {
        case BetaClass::LessThanOne: return {std::nullopt};
        case BetaClass::EqualOne: return {mpq_class(1, 5)};
        case BetaClass::GreaterThanOne: return {mpq_class(0)};
      }
      break;
  }
  throw InvalidArgument("unknown placement or beta class");
}

BetaClass classify_beta(const mpq_class& beta) {
  if (beta <= 0) throw InvalidArgument("beta must be positive");
  if (beta < 1) return BetaClass::LessThanOne;
  if (beta == 1) return BetaClass::EqualOne;
  return BetaClass::GreaterThanOne;
}

}  // namespace bipcorr

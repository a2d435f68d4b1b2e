#pragma once

// Leading-order estimates for the pair and joint avoidance probabilities,
// the relative-covariance estimates they compose into, and the limit table.
// Plain double arithmetic; exponents go through log2 where 2^{-2n} would
// underflow.

#include <gmpxx.h>

#include <optional>
#include <string_view>

#include "bipcorr/model.hpp"

namespace bipcorr {

enum class LemmaId : std::uint8_t { I, II, III, IV, V };

inline constexpr LemmaId kAllLemmas[] = {LemmaId::I, LemmaId::II, LemmaId::III, LemmaId::IV,
                                         LemmaId::V};

std::string_view lemma_name(LemmaId id);  // "I" .. "V"

/// I   P(b -/-> a)            ~ 2 * 2^{-n}
/// II  P(d -/-> a)            ~ 2^{-m} + 2^{-n}
/// III P(X0 -/-> Y0 -/-> X1)  ~ 2 * 2^{-(m+n-1)} + 2^{-2n}
/// IV  P(c -/-> b -/-> a)     ~ 3 * 2^{-2n}
/// V   P(d -/-> b -/-> a)     ~ 2^{-(m+n-2)} + 2^{-2n}
/// Requires m, n >= 2. May underflow to 0 for large n; see lemma_log2_estimate.
double lemma_estimate(LemmaId id, unsigned m, unsigned n);
double lemma_log2_estimate(LemmaId id, unsigned m, unsigned n);

/// The nine table entries: AllInX (-1/3, -1/3, -1/3), XXY (1/2, 1/5, -1),
/// XYX (1, 1/5, 0) for beta < 1, = 1, > 1.
mpq_class rc_limit(PlacementKind kind, BetaClass beta);

/// 1 - product / joint with the lemma two-term forms: AllInX uses I^2 and IV,
/// XXY uses I*II and V, XYX uses II^2 and III. Requires m, n >= 2.
double rc_finite_estimate(PlacementKind kind, unsigned m, unsigned n);

/// 1 - 2(1 - 2^{-gap}) / (4 + 2^{-gap}), the closed form quoted for XXY with
/// n - m = gap. Differs from rc_finite_estimate(XXY, m, m + gap), which has
/// 1 + 2^{-gap} in the numerator.
double xxy_quoted_closed_form(int gap);

/// Limit of rc_finite_estimate along m = floor(beta n). Empty value means the
/// estimate diverges to -infinity.
struct ComposedLimit {
  std::optional<mpq_class> value;
  bool diverges() const { return !value.has_value(); }
};
ComposedLimit composed_limit(PlacementKind kind, BetaClass beta);

BetaClass classify_beta(const mpq_class& beta);

}  // namespace bipcorr

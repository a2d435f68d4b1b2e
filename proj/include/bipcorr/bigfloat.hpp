#pragma once

// Interval arithmetic over MPFR. Lower ends are rounded toward -inf and upper
// ends toward +inf, so the true value always lies inside [lo, hi]; the
// half-width is the tracked rounding-error bound.

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

#include "bipcorr/dyadic.hpp"

namespace bipcorr {

class BigInterval {
 public:
  explicit BigInterval(mpfr_prec_t precision);
  BigInterval(const BigInterval& other);
  BigInterval(BigInterval&& other) noexcept;
  BigInterval& operator=(const BigInterval& other);
  BigInterval& operator=(BigInterval&& other) noexcept;
  ~BigInterval();

  static BigInterval exact(const Dyadic& value, mpfr_prec_t precision);
  static BigInterval from_integer(long value, mpfr_prec_t precision);
  static BigInterval from_mpz(const mpz_class& value, mpfr_prec_t precision);

  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

  /// this += coefficient * child * 2^{-shift}; coefficient >= 0, child >= 0.
  void add_scaled_product(const mpz_class& coefficient, const BigInterval& child,
                          unsigned long shift);
  /// this += weight * child; weight >= 0, child >= 0.
  void add_product(const BigInterval& weight, const BigInterval& child);
  /// Multiplies by 2^{-shift} (exact).
  void scale_down(unsigned long shift);
  /// this = a * b for non-negative intervals.
  static BigInterval product(const BigInterval& a, const BigInterval& b);
  /// a - b.
  static BigInterval difference(const BigInterval& a, const BigInterval& b);
  /// 1 - a / b for non-negative a and strictly positive b.
  static BigInterval one_minus_ratio(const BigInterval& a, const BigInterval& b);
  BigInterval negated() const;

  bool contains(const Dyadic& value) const;
  bool strictly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool strictly_negative() const { return mpfr_sgn(hi_) < 0; }

  double midpoint() const;
  double half_width() const;
  /// half_width / |midpoint|; 0 for the exact zero interval, +inf when the
  /// interval straddles zero with positive width.
  double relative_error() const;

  /// Midpoint in scientific notation with `digits` significant digits.
  std::string midpoint_string(int digits = 17) const;

 private:
  mpfr_t lo_;
  mpfr_t hi_;
  bool owns_ = true;
};

}  // namespace bipcorr

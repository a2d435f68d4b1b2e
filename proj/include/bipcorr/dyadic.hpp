#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace bipcorr {

/// Exact value numerator / 2^exponent. Always kept canonical: the numerator is
/// odd, or zero with exponent 0. Uniform-model probabilities are dyadic with
/// exponent <= m*n; covariances are dyadic too and may be negative.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(mpz_class numerator, std::uint64_t exponent);

  static Dyadic one() { return Dyadic(1, 0); }
  static Dyadic zero() { return Dyadic(); }

  const mpz_class& numerator() const { return num_; }
  std::uint64_t exponent() const { return exp_; }

  int sign() const { return sgn(num_); }
  bool is_zero() const { return num_ == 0; }
  /// 0 <= value <= 1.
  bool is_probability() const;

  mpq_class to_rational() const;
  double to_double() const;

  /// "num/2^e", e.g. "9/2^4", "0/2^0", "1/2^0".
  std::string to_string() const;
  /// Parses the to_string() form; throws InvalidArgument otherwise.
  static Dyadic parse(std::string_view text);

  /// Multiplies by 2^{-shift}.
  Dyadic scaled_down(std::uint64_t shift) const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic operator-() const;
  Dyadic& operator+=(const Dyadic& other) { return *this = *this + other; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  /// Cross-multiplied comparison.
  friend int compare(const Dyadic& a, const Dyadic& b);
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }

 private:
  void normalize();

  mpz_class num_ = 0;
  std::uint64_t exp_ = 0;
};

/// Exact probability in the uniform model.
using DyadicProb = Dyadic;

/// Lowest-terms "num/den" (den >= 1), e.g. "-1/8", "1/1".
std::string rational_string(const mpq_class& q);

/// Parses "NUM/DEN" or an integer; throws InvalidArgument on junk or den = 0.
mpq_class parse_rational(std::string_view text);

/// Signed relation to zero.
enum class Sign { Negative, Zero, Positive };

Sign sign_of(int s);
std::string_view sign_name(Sign s);

/// Sign of an estimate carrying an error bound or confidence interval.
enum class SignVerdict : std::uint8_t { Negative, Zero, Positive, Inconclusive };
std::string_view verdict_name(SignVerdict v);

}  // namespace bipcorr

#include "bipcorr/bigfloat.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace bipcorr {

BigInterval::BigInterval(mpfr_prec_t precision) {
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

BigInterval::BigInterval(const BigInterval& other) {
  mpfr_init2(lo_, other.precision());
  mpfr_init2(hi_, other.precision());
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

BigInterval::BigInterval(BigInterval&& other) noexcept {
  // mpfr_t is an array of one struct; steal the limbs and leave `other` empty.
  *lo_ = *other.lo_;
  *hi_ = *other.hi_;
  other.owns_ = false;
}

BigInterval& BigInterval::operator=(const BigInterval& other) {
  if (this != &other) {
    BigInterval copy(other);
    *this = std::move(copy);
  }
  return *this;
}

BigInterval& BigInterval::operator=(BigInterval&& other) noexcept {
  if (this != &other) {
    if (owns_) {
      mpfr_clear(lo_);
      mpfr_clear(hi_);
    }
    *lo_ = *other.lo_;
    *hi_ = *other.hi_;
    owns_ = other.owns_;
    other.owns_ = false;
  }
  return *this;
}

BigInterval::~BigInterval() {
  if (owns_) {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }
}

BigInterval BigInterval::exact(const Dyadic& value, mpfr_prec_t precision) {
  BigInterval out(precision);
  mpfr_set_z_2exp(out.lo_, value.numerator().get_mpz_t(),
                  -static_cast<mpfr_exp_t>(value.exponent()), MPFR_RNDD);
  mpfr_set_z_2exp(out.hi_, value.numerator().get_mpz_t(),
                  -static_cast<mpfr_exp_t>(value.exponent()), MPFR_RNDU);
  return out;
}

BigInterval BigInterval::from_integer(long value, mpfr_prec_t precision) {
  BigInterval out(precision);
  mpfr_set_si(out.lo_, value, MPFR_RNDD);
  mpfr_set_si(out.hi_, value, MPFR_RNDU);
  return out;
}

BigInterval BigInterval::from_mpz(const mpz_class& value, mpfr_prec_t precision) {
  BigInterval out(precision);
  mpfr_set_z(out.lo_, value.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(out.hi_, value.get_mpz_t(), MPFR_RNDU);
  return out;
}

void BigInterval::add_product(const BigInterval& weight, const BigInterval& child) {
  mpfr_fma(lo_, weight.lo_, child.lo_, lo_, MPFR_RNDD);
  mpfr_fma(hi_, weight.hi_, child.hi_, hi_, MPFR_RNDU);
}

void BigInterval::scale_down(unsigned long shift) {
  mpfr_div_2ui(lo_, lo_, shift, MPFR_RNDD);
  mpfr_div_2ui(hi_, hi_, shift, MPFR_RNDU);
}

void BigInterval::add_scaled_product(const mpz_class& coefficient, const BigInterval& child,
                                     unsigned long shift) {
  mpfr_t t;
  mpfr_init2(t, precision());
  mpfr_mul_z(t, child.lo_, coefficient.get_mpz_t(), MPFR_RNDD);
  mpfr_div_2ui(t, t, shift, MPFR_RNDD);
  mpfr_add(lo_, lo_, t, MPFR_RNDD);
  mpfr_mul_z(t, child.hi_, coefficient.get_mpz_t(), MPFR_RNDU);
  mpfr_div_2ui(t, t, shift, MPFR_RNDU);
  mpfr_add(hi_, hi_, t, MPFR_RNDU);
  mpfr_clear(t);
}

BigInterval BigInterval::product(const BigInterval& a, const BigInterval& b) {
  BigInterval out(std::max(a.precision(), b.precision()));
  mpfr_mul(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_mul(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

BigInterval BigInterval::difference(const BigInterval& a, const BigInterval& b) {
  BigInterval out(std::max(a.precision(), b.precision()));
  mpfr_sub(out.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(out.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return out;
}

BigInterval BigInterval::one_minus_ratio(const BigInterval& a, const BigInterval& b) {
  BigInterval out(std::max(a.precision(), b.precision()));
  mpfr_t r;
  mpfr_init2(r, out.precision());
  // Largest ratio gives the lowest result.
  mpfr_div(r, a.hi_, b.lo_, MPFR_RNDU);
  mpfr_ui_sub(out.lo_, 1, r, MPFR_RNDD);
  mpfr_div(r, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_ui_sub(out.hi_, 1, r, MPFR_RNDU);
  mpfr_clear(r);
  return out;
}

BigInterval BigInterval::negated() const {
  BigInterval out(precision());
  mpfr_neg(out.lo_, hi_, MPFR_RNDD);
  mpfr_neg(out.hi_, lo_, MPFR_RNDU);
  return out;
}

bool BigInterval::contains(const Dyadic& value) const {
  mpfr_t v;
  // Exact conversion: enough bits for the whole numerator.
  const auto bits = std::max<mpfr_prec_t>(
      MPFR_PREC_MIN, static_cast<mpfr_prec_t>(mpz_sizeinbase(value.numerator().get_mpz_t(), 2)));
  mpfr_init2(v, bits);
  mpfr_set_z_2exp(v, value.numerator().get_mpz_t(), -static_cast<mpfr_exp_t>(value.exponent()),
                  MPFR_RNDN);
  const bool inside = mpfr_lessequal_p(lo_, v) && mpfr_lessequal_p(v, hi_);
  mpfr_clear(v);
  return inside;
}

double BigInterval::midpoint() const {
  mpfr_t m;
  mpfr_init2(m, precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

double BigInterval::half_width() const {
  mpfr_t w;
  mpfr_init2(w, precision() + 1);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  mpfr_div_2ui(w, w, 1, MPFR_RNDU);
  const double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

double BigInterval::relative_error() const {
  mpfr_t w, m;
  mpfr_init2(w, precision() + 1);
  mpfr_init2(m, precision() + 1);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  double out;
  if (mpfr_zero_p(w)) {
    out = 0.0;
  } else if (mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0) {
    out = std::numeric_limits<double>::infinity();
  } else {
    mpfr_div(w, w, m, MPFR_RNDU);
    out = std::fabs(mpfr_get_d(w, MPFR_RNDU));
  }
  mpfr_clear(w);
  mpfr_clear(m);
  return out;
}

std::string BigInterval::midpoint_string(int digits) const {
  mpfr_t m;
  mpfr_init2(m, precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  char* raw = nullptr;
  mpfr_asprintf(&raw, "%.*Rg", digits, m);
  std::string s(raw);
  mpfr_free_str(raw);
  mpfr_clear(m);
  return s;
}

}  // namespace bipcorr

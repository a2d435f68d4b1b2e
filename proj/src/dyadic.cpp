#include "bipcorr/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "bipcorr/errors.hpp"

namespace bipcorr {

Dyadic::Dyadic(mpz_class numerator, std::uint64_t exponent)
    : num_(std::move(numerator)), exp_(exponent) {
  normalize();
}

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  const mp_bitcnt_t tz = mpz_scan1(num_.get_mpz_t(), 0);
  const std::uint64_t shift = std::min<std::uint64_t>(tz, exp_);
  if (shift) {
    mpz_tdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), shift);
    exp_ -= shift;
  }
}

bool Dyadic::is_probability() const {
  if (num_ < 0) return false;
  mpz_class bound = 1;
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), exp_);
  return num_ <= bound;
}

mpq_class Dyadic::to_rational() const {
  mpz_class den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), exp_);
  mpq_class q(num_, den);
  q.canonicalize();
  return q;
}

double Dyadic::to_double() const {
  // mpz_get_d_2exp keeps huge exponents out of the double range until the end.
  long e = 0;
  const double mant = mpz_get_d_2exp(&e, num_.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(e - static_cast<long>(exp_)));
}

std::string Dyadic::to_string() const {
  return num_.get_str() + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::parse(std::string_view text) {
  const auto slash = text.find("/2^");
  if (slash == std::string_view::npos) {
    throw InvalidArgument("expected num/2^e, got '" + std::string(text) + "'");
  }
  const std::string num(text.substr(0, slash));
  const std::string exp(text.substr(slash + 3));
  if (exp.empty() || !std::all_of(exp.begin(), exp.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw InvalidArgument("bad dyadic exponent in '" + std::string(text) + "'");
  }
  mpz_class z;
  if (z.set_str(num, 10) != 0) {
    throw InvalidArgument("bad dyadic numerator in '" + std::string(text) + "'");
  }
  return Dyadic(std::move(z), std::stoull(exp));
}

Dyadic Dyadic::scaled_down(std::uint64_t shift) const { return Dyadic(num_, exp_ + shift); }

namespace {

// Lifts a numerator from exponent `from` to exponent `to` (to >= from).
mpz_class lift(const mpz_class& num, std::uint64_t from, std::uint64_t to) {
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), num.get_mpz_t(), to - from);
  return out;
}

}  // namespace

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.exp_ == b.exp_) return Dyadic(a.num_ + b.num_, a.exp_);
  if (a.exp_ < b.exp_) return Dyadic(lift(a.num_, a.exp_, b.exp_) + b.num_, b.exp_);
  return Dyadic(a.num_ + lift(b.num_, b.exp_, a.exp_), a.exp_);
}

Dyadic Dyadic::operator-() const {
  Dyadic out = *this;
  out.num_ = -out.num_;
  return out;
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
}

int compare(const Dyadic& a, const Dyadic& b) {
  const std::uint64_t e = std::max(a.exp_, b.exp_);
  return cmp(lift(a.num_, a.exp_, e), lift(b.num_, b.exp_, e));
}

std::string rational_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw InvalidArgument("empty rational");
  mpq_class q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) {
    throw InvalidArgument("expected NUM/DEN, got '" + s + "'");
  }
  q.canonicalize();
  return q;
}

Sign sign_of(int s) {
  return s < 0 ? Sign::Negative : (s > 0 ? Sign::Positive : Sign::Zero);
}

std::string_view sign_name(Sign s) {
  switch (s) {
    case Sign::Negative:
      return "negative";
    case Sign::Zero:
      return "zero";
    case Sign::Positive:
      return "positive";
  }
  return "?";
}

std::string_view verdict_name(SignVerdict v) {
  switch (v) {
    case SignVerdict::Negative: return "negative";
    case SignVerdict::Zero: return "zero";
    case SignVerdict::Positive: return "positive";
    case SignVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace bipcorr

#include "bullbear/rational.hpp"

#include <cmath>
#include <ostream>

#include "bullbear/error.hpp"

namespace bullbear {

ExactRational::ExactRational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) {
    throw Error(Errc::domain_error, "rational with zero denominator");
  }
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

ExactRational ExactRational::from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(Errc::domain_error, "cannot represent a non-finite double exactly");
  }
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), value);
  return ExactRational(std::move(q));
}

ExactRational ExactRational::parse(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0) {
    throw Error(Errc::parse_error, "not a rational number: '" + text + "'");
  }
  if (q.get_den() == 0) {
    throw Error(Errc::domain_error, "rational with zero denominator: '" + text + "'");
  }
  q.canonicalize();
  return ExactRational(std::move(q));
}

double ExactRational::to_double() const {
  // mpq_get_d truncates; go through mpfr-free correct rounding by scaling.
  const BigInt& num = value_.get_num();
  const BigInt& den = value_.get_den();
  if (num == 0) return 0.0;
  const long num_bits = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  const long den_bits = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  // Produce a 64-bit-plus quotient, then let the integer->double conversion round.
  const long shift = 66 - (num_bits - den_bits);
  BigInt scaled = num;
  if (shift > 0) {
    scaled <<= static_cast<mp_bitcnt_t>(shift);
  } else if (shift < 0) {
    scaled >>= static_cast<mp_bitcnt_t>(-shift);
  }
  BigInt quotient;
  BigInt remainder;
  mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  if (remainder != 0) {
    // sticky bit keeps round-to-nearest-even honest
    quotient = quotient * 2 + (sgn(quotient) < 0 ? -1 : 1);
    return std::ldexp(bullbear::to_double(quotient), static_cast<int>(-shift - 1));
  }
  return std::ldexp(bullbear::to_double(quotient), static_cast<int>(-shift));
}

std::string ExactRational::str() const { return value_.get_str(10); }

ExactRational& ExactRational::operator+=(const ExactRational& rhs) {
  value_ += rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator-=(const ExactRational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator*=(const ExactRational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator/=(const ExactRational& rhs) {
  if (rhs.is_zero()) {
    throw Error(Errc::domain_error, "division by zero");
  }
  value_ /= rhs.value_;
  return *this;
}

ExactRational ExactRational::operator-() const { return ExactRational(mpq_class(-value_)); }

std::ostream& operator<<(std::ostream& os, const ExactRational& value) { return os << value.str(); }

ExactRational abs(const ExactRational& value) { return value.sign() < 0 ? -value : value; }

double to_double(const BigInt& value) {
  // mpz_get_d truncates toward zero; round to nearest instead.
  const size_t bits = mpz_sizeinbase(value.get_mpz_t(), 2);
  if (bits <= 53) return mpz_get_d(value.get_mpz_t());
  const auto drop = static_cast<mp_bitcnt_t>(bits - 54);
  BigInt magnitude = abs(value);
  BigInt top;
  mpz_tdiv_q_2exp(top.get_mpz_t(), magnitude.get_mpz_t(), drop);
  // top has 54 bits: 53 kept + 1 rounding bit
  const bool round_bit = mpz_tstbit(top.get_mpz_t(), 0) != 0;
  const bool sticky = mpz_scan1(magnitude.get_mpz_t(), 0) < drop;
  top >>= 1;
  if (round_bit && (sticky || mpz_tstbit(top.get_mpz_t(), 0) != 0)) {
    top += 1;
  }
  const double result = std::ldexp(mpz_get_d(top.get_mpz_t()), static_cast<int>(drop + 1));
  return sgn(value) < 0 ? -result : result;
}

}  // namespace bullbear

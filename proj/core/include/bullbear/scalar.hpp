#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

#include "bullbear/rational.hpp"

namespace bullbear {

/// Relative gap below which two floating values count as coincident.
inline constexpr double kDistinctnessTolerance = 1e-9;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_integer(const BigInt& value) { return to_double(value); }
  static double to_real(double value) { return value; }
  static bool is_zero(double value) { return value == 0.0; }
  static bool distinct(double a, double b) {
    return std::abs(a - b) > kDistinctnessTolerance * std::max(std::abs(a), std::abs(b));
  }
};

template <>
struct scalar_traits<ExactRational> {
  static constexpr bool exact = true;
  static ExactRational from_integer(const BigInt& value) { return ExactRational(value); }
  static double to_real(const ExactRational& value) { return value.to_double(); }
  static bool is_zero(const ExactRational& value) { return value.is_zero(); }
  static bool distinct(const ExactRational& a, const ExactRational& b) { return a != b; }
};

/// A field usable by the formula code: double (floating) or ExactRational (exact).
template <class S>
concept Scalar = requires(S a, S b, const BigInt& big) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  { scalar_traits<S>::from_integer(big) } -> std::convertible_to<S>;
  { scalar_traits<S>::to_real(a) } -> std::convertible_to<double>;
  { scalar_traits<S>::distinct(a, b) } -> std::convertible_to<bool>;
};

/// base^exponent by repeated squaring; 0^0 == 1.
template <Scalar S>
S ipow(S base, unsigned exponent) {
  S result(1);
  while (exponent != 0) {
    if ((exponent & 1U) != 0) result = result * base;
    exponent >>= 1U;
    if (exponent != 0) base = base * base;
  }
  return result;
}

}  // namespace bullbear

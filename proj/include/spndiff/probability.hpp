#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace spndiff {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// "p/q" in lowest terms, or "n" for integers.
std::string to_string(const Rational& r);

/// "2^-k" when r is a power of two, otherwise the same as to_string().
std::string to_power_string(const Rational& r);

/// Exact non-negative dyadic rational m * 2^-e with a 128-bit odd mantissa.
///
/// Every S-box transition probability is count/16, so every trail
/// probability is dyadic. Products throw std::overflow_error instead of
/// wrapping; the mantissa only accumulates odd parts of counts (at most 7
/// per active S-box), which leaves room for more than forty active S-boxes.
class Dyadic {
 public:
  using Mantissa = unsigned __int128;

  constexpr Dyadic() = default;

  static Dyadic one() { return ratio(1, 0); }
  /// num / 2^log2_den
  static Dyadic ratio(std::uint64_t num, int log2_den);

  bool is_zero() const { return mantissa_ == 0; }

  Dyadic operator*(const Dyadic& other) const;
  Dyadic& operator*=(const Dyadic& other) { return *this = *this * other; }

  std::strong_ordering operator<=>(const Dyadic& other) const;
  bool operator==(const Dyadic& other) const = default;

  Rational to_rational() const;
  double log2() const;
  std::string str() const { return to_string(to_rational()); }

 private:
  Mantissa mantissa_ = 0;
  int exponent_ = 0;  // value = mantissa_ * 2^-exponent_
};

}  // namespace spndiff

#include "spndiff/probability.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spndiff {

namespace {

using Mantissa = Dyadic::Mantissa;

int bit_width128(Mantissa v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(v));
}

BigInt to_bigint(Mantissa v) {
  BigInt out = static_cast<std::uint64_t>(v >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(v);
  return out;
}

// Compares a * 2^shift with b for shift >= 0.
std::strong_ordering compare_shifted(Mantissa a, int shift, Mantissa b) {
  if (a == 0) return b == 0 ? std::strong_ordering::equal : std::strong_ordering::less;
  if (bit_width128(a) + shift > 128) return std::strong_ordering::greater;
  return (a << shift) <=> b;
}

}  // namespace

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_power_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  auto is_pow2 = [](const BigInt& v) { return v > 0 && (v & (v - 1)) == 0; };
  if (num == 1 && is_pow2(den)) {
    return "2^-" + std::to_string(boost::multiprecision::msb(den));
  }
  if (den == 1 && is_pow2(num)) {
    return "2^" + std::to_string(boost::multiprecision::msb(num));
  }
  return to_string(r);
}

Dyadic Dyadic::ratio(std::uint64_t num, int log2_den) {
  Dyadic d;
  if (num == 0) return d;
  const int tz = std::countr_zero(num);
  d.mantissa_ = num >> tz;
  d.exponent_ = log2_den - tz;
  return d;
}

Dyadic Dyadic::operator*(const Dyadic& other) const {
  if (is_zero() || other.is_zero()) return Dyadic{};
  if (bit_width128(mantissa_) + bit_width128(other.mantissa_) > 128 &&
      other.mantissa_ > std::numeric_limits<Mantissa>::max() / mantissa_) {
    throw std::overflow_error("dyadic probability mantissa overflow");
  }
  Dyadic d;
  d.mantissa_ = mantissa_ * other.mantissa_;  // product of odd numbers stays odd
  d.exponent_ = exponent_ + other.exponent_;
  return d;
}

std::strong_ordering Dyadic::operator<=>(const Dyadic& other) const {
  if (is_zero() || other.is_zero()) {
    return static_cast<int>(!is_zero()) <=> static_cast<int>(!other.is_zero());
  }
  // m1 * 2^-e1 vs m2 * 2^-e2  <=>  m1 * 2^(e2-e1) vs m2
  const int shift = other.exponent_ - exponent_;
  if (shift >= 0) return compare_shifted(mantissa_, shift, other.mantissa_);
  return 0 <=> compare_shifted(other.mantissa_, -shift, mantissa_);
}

Rational Dyadic::to_rational() const {
  if (is_zero()) return Rational(0);
  BigInt num = to_bigint(mantissa_);
  if (exponent_ <= 0) return Rational(num << -exponent_);
  BigInt den = 1;
  den <<= exponent_;
  return Rational(num, den);
}

double Dyadic::log2() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  const double hi = static_cast<double>(static_cast<std::uint64_t>(mantissa_ >> 64));
  const double lo = static_cast<double>(static_cast<std::uint64_t>(mantissa_));
  return std::log2(hi * 18446744073709551616.0 + lo) - exponent_;
}

}  // namespace spndiff

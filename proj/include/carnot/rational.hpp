#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "carnot/bigint.hpp"

namespace carnot {

/// Exact rational number over BigInt.
///
/// Normalization strips common powers of two on every operation (the
/// dominant shared factor here, since experiment inputs are dyadic) and
/// performs a full gcd reduction only when operands grow past a limb
/// threshold, so equality and zero tests must not assume canonical form.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(long long num, long long den);
  Rational(BigInt num, BigInt den);

  /// Exact binary value of the double (always representable).
  static Rational from_double_exact(double v);
  /// Round v to the given number of significant bits; exact dyadic result.
  static Rational snap(double v, int significant_bits);
  /// Parses "p", "p/q", and plain decimals like "-1.25" (exact).
  static Rational parse(std::string_view s);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  int sign() const { return num_.sign(); }
  Rational abs() const;
  bool is_integer() const;

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  static int compare(const Rational& a, const Rational& b);
  bool operator==(const Rational& o) const { return compare(*this, o) == 0; }
  bool operator!=(const Rational& o) const { return compare(*this, o) != 0; }
  bool operator<(const Rational& o) const { return compare(*this, o) < 0; }
  bool operator<=(const Rational& o) const { return compare(*this, o) <= 0; }
  bool operator>(const Rational& o) const { return compare(*this, o) > 0; }
  bool operator>=(const Rational& o) const { return compare(*this, o) >= 0; }

  Rational pow(int e) const;
  /// Exact m-th root of a nonnegative rational, if it exists in Q.
  std::optional<Rational> nth_root(int m) const;

  double to_double() const;
  /// Canonical "p/q" (or "p" when q == 1) after full reduction.
  std::string to_string() const;

  /// Full gcd reduction to lowest terms.
  void reduce();

private:
  BigInt num_, den_;  // den_ > 0
  void normalize();
};

}  // namespace carnot

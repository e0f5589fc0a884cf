#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

/// Arbitrary-precision signed integer (sign + little-endian 64-bit limbs).
///
/// Sized for this project's workloads: exact group-law evaluation chains
/// whose minimal denominators stay in the hundreds of bits. Schoolbook
/// multiplication and binary gcd/division are deliberate; no limb count
/// here ever justifies asymptotically fancier kernels.
class BigInt {
public:
  BigInt() = default;
  BigInt(long long v);  // NOLINT(google-explicit-constructor)

  static BigInt pow2(int k);

  bool is_zero() const { return limbs_.empty(); }
  int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }
  bool is_negative() const { return neg_; }

  BigInt operator-() const;
  BigInt abs() const;
  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;
  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  /// Signed comparison: negative, zero or positive.
  static int compare(const BigInt& a, const BigInt& b);
  bool operator==(const BigInt& o) const { return compare(*this, o) == 0; }
  bool operator!=(const BigInt& o) const { return compare(*this, o) != 0; }
  bool operator<(const BigInt& o) const { return compare(*this, o) < 0; }
  bool operator<=(const BigInt& o) const { return compare(*this, o) <= 0; }
  bool operator>(const BigInt& o) const { return compare(*this, o) > 0; }
  bool operator>=(const BigInt& o) const { return compare(*this, o) >= 0; }

  BigInt shifted_left(int bits) const;
  BigInt shifted_right(int bits) const;
  int bit_length() const;
  /// Number of trailing zero bits; 0 for the zero value.
  int trailing_zero_bits() const;

  /// Truncated division, |r| < |b|, sign(r) == sign(a). Throws on b == 0.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  BigInt operator/(const BigInt& o) const;
  BigInt operator%(const BigInt& o) const;

  static BigInt gcd(const BigInt& a, const BigInt& b);

  /// Nearest double (top 64 bits + ldexp); infinities on overflow.
  double to_double() const;
  /// Throws std::overflow_error when out of range.
  long long to_int64() const;
  bool fits_int64() const;

  std::string to_string() const;
  static BigInt from_string(std::string_view s);

  size_t limb_count() const { return limbs_.size(); }

private:
  bool neg_ = false;
  std::vector<uint64_t> limbs_;

  void trim();
  static int cmp_mag(const BigInt& a, const BigInt& b);
  static std::vector<uint64_t> add_mag(const std::vector<uint64_t>& a,
                                       const std::vector<uint64_t>& b);
  // requires |a| >= |b|
  static std::vector<uint64_t> sub_mag(const std::vector<uint64_t>& a,
                                       const std::vector<uint64_t>& b);
  static void divmod_mag(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  uint64_t div_small_inplace(uint64_t d);  // returns remainder
};

}  // namespace carnot

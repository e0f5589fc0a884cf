#include "carnot/bigint.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carnot {

using u64 = uint64_t;
using u128 = unsigned __int128;

BigInt::BigInt(long long v) {
  if (v == 0) return;
  neg_ = v < 0;
  u64 mag = neg_ ? (~static_cast<u64>(v) + 1) : static_cast<u64>(v);
  limbs_.push_back(mag);
}

BigInt BigInt::pow2(int k) {
  BigInt r;
  r.limbs_.assign(static_cast<size_t>(k / 64) + 1, 0);
  r.limbs_.back() = u64{1} << (k % 64);
  return r;
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) neg_ = false;
}

int BigInt::cmp_mag(const BigInt& a, const BigInt& b) {
  if (a.limbs_.size() != b.limbs_.size())
    return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
  for (size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
  }
  return 0;
}

int BigInt::compare(const BigInt& a, const BigInt& b) {
  if (a.neg_ != b.neg_) return a.neg_ ? -1 : 1;
  int c = cmp_mag(a, b);
  return a.neg_ ? -c : c;
}

std::vector<u64> BigInt::add_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
  const std::vector<u64>& big = a.size() >= b.size() ? a : b;
  const std::vector<u64>& small = a.size() >= b.size() ? b : a;
  std::vector<u64> out(big.size() + 1, 0);
  u128 carry = 0;
  for (size_t i = 0; i < big.size(); ++i) {
    u128 s = carry + big[i] + (i < small.size() ? small[i] : 0);
    out[i] = static_cast<u64>(s);
    carry = s >> 64;
  }
  out[big.size()] = static_cast<u64>(carry);
  return out;
}

std::vector<u64> BigInt::sub_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
  std::vector<u64> out(a.size(), 0);
  u64 borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    u64 bi = i < b.size() ? b[i] : 0;
    u64 d = a[i] - bi;
    u64 borrow2 = a[i] < bi ? 1 : 0;
    u64 d2 = d - borrow;
    if (d < borrow) borrow2 = 1;
    out[i] = d2;
    borrow = borrow2;
  }
  return out;
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  if (!r.is_zero()) r.neg_ = !r.neg_;
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  r.neg_ = false;
  return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
  BigInt r;
  if (neg_ == o.neg_) {
    r.limbs_ = add_mag(limbs_, o.limbs_);
    r.neg_ = neg_;
  } else {
    int c = cmp_mag(*this, o);
    if (c == 0) return BigInt();
    const BigInt& big = c > 0 ? *this : o;
    const BigInt& small = c > 0 ? o : *this;
    r.limbs_ = sub_mag(big.limbs_, small.limbs_);
    r.neg_ = big.neg_;
  }
  r.trim();
  return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  if (is_zero() || o.is_zero()) return BigInt();
  BigInt r;
  r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
  for (size_t i = 0; i < limbs_.size(); ++i) {
    u128 carry = 0;
    u64 ai = limbs_[i];
    for (size_t j = 0; j < o.limbs_.size(); ++j) {
      u128 cur = static_cast<u128>(ai) * o.limbs_[j] + r.limbs_[i + j] + carry;
      r.limbs_[i + j] = static_cast<u64>(cur);
      carry = cur >> 64;
    }
    size_t k = i + o.limbs_.size();
    while (carry != 0) {
      u128 cur = static_cast<u128>(r.limbs_[k]) + carry;
      r.limbs_[k] = static_cast<u64>(cur);
      carry = cur >> 64;
      ++k;
    }
  }
  r.neg_ = neg_ != o.neg_;
  r.trim();
  return r;
}

BigInt BigInt::shifted_left(int bits) const {
  if (is_zero() || bits == 0) return *this;
  if (bits < 0) return shifted_right(-bits);
  int limb_shift = bits / 64, bit_shift = bits % 64;
  BigInt r;
  r.neg_ = neg_;
  r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
  for (size_t i = 0; i < limbs_.size(); ++i) {
    r.limbs_[i + limb_shift] |= bit_shift == 0 ? limbs_[i] : (limbs_[i] << bit_shift);
    if (bit_shift != 0) r.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
  }
  r.trim();
  return r;
}

BigInt BigInt::shifted_right(int bits) const {
  if (is_zero() || bits == 0) return *this;
  if (bits < 0) return shifted_left(-bits);
  int limb_shift = bits / 64, bit_shift = bits % 64;
  if (static_cast<size_t>(limb_shift) >= limbs_.size()) return BigInt();
  BigInt r;
  r.neg_ = neg_;
  r.limbs_.assign(limbs_.size() - limb_shift, 0);
  for (size_t i = 0; i < r.limbs_.size(); ++i) {
    u64 lo = limbs_[i + limb_shift];
    u64 hi = i + limb_shift + 1 < limbs_.size() ? limbs_[i + limb_shift + 1] : 0;
    r.limbs_[i] = bit_shift == 0 ? lo : ((lo >> bit_shift) | (hi << (64 - bit_shift)));
  }
  r.trim();
  return r;
}

int BigInt::bit_length() const {
  if (is_zero()) return 0;
  return static_cast<int>((limbs_.size() - 1) * 64) + 64 -
         std::countl_zero(limbs_.back());
}

int BigInt::trailing_zero_bits() const {
  if (is_zero()) return 0;
  for (size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i] != 0)
      return static_cast<int>(i * 64) + std::countr_zero(limbs_[i]);
  }
  return 0;
}

void BigInt::divmod_mag(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  // binary long division on magnitudes
  q = BigInt();
  r = BigInt();
  if (cmp_mag(a, b) < 0) {
    r = a.abs();
    return;
  }
  int shift = a.bit_length() - b.bit_length();
  BigInt d = b.abs().shifted_left(shift);
  r = a.abs();
  std::vector<u64> qbits(static_cast<size_t>(shift / 64) + 1, 0);
  for (int i = shift; i >= 0; --i) {
    if (cmp_mag(r, d) >= 0) {
      r = r - d;
      qbits[static_cast<size_t>(i) / 64] |= u64{1} << (i % 64);
    }
    d = d.shifted_right(1);
  }
  q.limbs_ = std::move(qbits);
  q.trim();
  r.trim();
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
  divmod_mag(a, b, q, r);
  q.neg_ = !q.is_zero() && (a.neg_ != b.neg_);
  r.neg_ = !r.is_zero() && a.neg_;
}

BigInt BigInt::operator/(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return r;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
  BigInt x = a.abs(), y = b.abs();
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  int xz = x.trailing_zero_bits(), yz = y.trailing_zero_bits();
  int common = std::min(xz, yz);
  x = x.shifted_right(xz);
  for (;;) {
    y = y.shifted_right(y.trailing_zero_bits());
    if (cmp_mag(x, y) > 0) std::swap(x, y);
    y = y - x;
    if (y.is_zero()) break;
  }
  return x.shifted_left(common);
}

double BigInt::to_double() const {
  if (is_zero()) return 0.0;
  int bl = bit_length();
  double mag;
  if (bl <= 64) {
    mag = static_cast<double>(limbs_[0]);
  } else {
    BigInt top = shifted_right(bl - 64);
    mag = std::ldexp(static_cast<double>(top.limbs_[0]), bl - 64);
  }
  return neg_ ? -mag : mag;
}

bool BigInt::fits_int64() const {
  if (limbs_.size() > 1) return false;
  if (limbs_.empty()) return true;
  u64 lim = neg_ ? (u64{1} << 63) : ((u64{1} << 63) - 1);
  return limbs_[0] <= lim;
}

long long BigInt::to_int64() const {
  if (!fits_int64()) throw std::overflow_error("BigInt: does not fit int64");
  if (is_zero()) return 0;
  return neg_ ? -static_cast<long long>(limbs_[0] - 1) - 1
              : static_cast<long long>(limbs_[0]);
}

uint64_t BigInt::div_small_inplace(u64 d) {
  u128 rem = 0;
  for (size_t i = limbs_.size(); i-- > 0;) {
    u128 cur = (rem << 64) | limbs_[i];
    limbs_[i] = static_cast<u64>(cur / d);
    rem = cur % d;
  }
  trim();
  return static_cast<u64>(rem);
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  BigInt tmp = abs();
  constexpr u64 kChunk = 1000000000000000000ULL;  // 1e18
  std::vector<u64> chunks;
  while (!tmp.is_zero()) chunks.push_back(tmp.div_small_inplace(kChunk));
  std::string out = neg_ ? "-" : "";
  out += std::to_string(chunks.back());
  for (size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out += std::string(18 - part.size(), '0') + part;
  }
  return out;
}

BigInt BigInt::from_string(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("BigInt: empty string");
  bool neg = false;
  size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    pos = 1;
  }
  if (pos == s.size()) throw std::invalid_argument("BigInt: no digits");
  BigInt r;
  BigInt ten(10);
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c < '0' || c > '9') throw std::invalid_argument("BigInt: bad digit");
    r = r * ten + BigInt(c - '0');
  }
  if (neg && !r.is_zero()) r.neg_ = true;
  return r;
}

}  // namespace carnot

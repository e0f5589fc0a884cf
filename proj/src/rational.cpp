#include "carnot/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace carnot {

namespace {
constexpr size_t kFullReduceLimbs = 12;
}

Rational::Rational(long long num, long long den) : num_(num), den_(den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  normalize();
}

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_.is_negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  int z = std::min(num_.trailing_zero_bits(), den_.trailing_zero_bits());
  if (z > 0) {
    num_ = num_.shifted_right(z);
    den_ = den_.shifted_right(z);
  }
  if (num_.limb_count() > kFullReduceLimbs || den_.limb_count() > kFullReduceLimbs)
    reduce();
}

void Rational::reduce() {
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Rational Rational::from_double_exact(double v) {
  if (!std::isfinite(v)) throw std::domain_error("Rational: non-finite double");
  if (v == 0.0) return Rational();
  int exp = 0;
  double m = std::frexp(v, &exp);       // v = m * 2^exp, |m| in [0.5, 1)
  auto mant = static_cast<long long>(std::ldexp(m, 53));  // exact, 53 bits
  int e = exp - 53;
  if (e >= 0) return Rational(BigInt(mant).shifted_left(e), BigInt(1));
  return Rational(BigInt(mant), BigInt::pow2(-e));
}

Rational Rational::snap(double v, int significant_bits) {
  if (!std::isfinite(v)) throw std::domain_error("Rational: non-finite double");
  if (v == 0.0) return Rational();
  int exp = 0;
  double m = std::frexp(v, &exp);
  auto mant = static_cast<long long>(std::llround(std::ldexp(m, significant_bits)));
  int e = exp - significant_bits;
  if (e >= 0) return Rational(BigInt(mant).shifted_left(e), BigInt(1));
  return Rational(BigInt(mant), BigInt::pow2(-e));
}

Rational Rational::parse(std::string_view s) {
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    return Rational(BigInt::from_string(s.substr(0, slash)),
                    BigInt::from_string(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rational(BigInt::from_string(s), BigInt(1));
  std::string digits(s.substr(0, dot));
  std::string_view frac = s.substr(dot + 1);
  digits += frac;
  BigInt den(1);
  for (size_t i = 0; i < frac.size(); ++i) den = den * BigInt(10);
  return Rational(BigInt::from_string(digits), den);
}

Rational Rational::abs() const {
  Rational r = *this;
  r.num_ = r.num_.abs();
  return r;
}

bool Rational::is_integer() const {
  Rational r = *this;
  r.reduce();
  return r.den_ == BigInt(1);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(num_ * o.den_, den_ * o.num_);
}

int Rational::compare(const Rational& a, const Rational& b) {
  return BigInt::compare(a.num_ * b.den_, b.num_ * a.den_);
}

Rational Rational::pow(int e) const {
  if (e == 0) return Rational(1);
  if (e < 0) return Rational(1) / pow(-e);
  Rational base = *this, acc(1);
  int k = e;
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

namespace {

// floor of the m-th root, input > 0
std::optional<BigInt> exact_iroot(const BigInt& v, int m) {
  if (v == BigInt(1)) return BigInt(1);
  // double guess, then local search
  double guess = std::pow(v.to_double(), 1.0 / m);
  auto check = [&](const BigInt& c) {
    if (c.sign() <= 0) return false;
    BigInt p(1);
    for (int i = 0; i < m; ++i) p = p * c;
    return p == v;
  };
  long long g = std::llround(guess);
  for (long long c = std::max(1LL, g - 2); c <= g + 2; ++c) {
    if (check(BigInt(c))) return BigInt(c);
  }
  // wide binary search fallback for values beyond double-guess reliability
  BigInt lo(1), hi = BigInt::pow2(v.bit_length() / m + 1);
  while (lo <= hi) {
    BigInt mid = (lo + hi).shifted_right(1);
    BigInt p(1);
    for (int i = 0; i < m; ++i) p = p * mid;
    int c = BigInt::compare(p, v);
    if (c == 0) return mid;
    if (c < 0)
      lo = mid + BigInt(1);
    else
      hi = mid - BigInt(1);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Rational> Rational::nth_root(int m) const {
  if (m <= 0) throw std::invalid_argument("Rational: root order must be positive");
  if (sign() < 0) return std::nullopt;
  if (is_zero()) return Rational(0);
  Rational r = *this;
  r.reduce();
  auto rn = exact_iroot(r.num_, m);
  if (!rn) return std::nullopt;
  auto rd = exact_iroot(r.den_, m);
  if (!rd) return std::nullopt;
  return Rational(*rn, *rd);
}

double Rational::to_double() const {
  if (num_.is_zero()) return 0.0;
  int bn = num_.bit_length(), bd = den_.bit_length();
  // scale both to ~62 significant bits, divide, restore exponent
  int sn = bn - 62, sd = bd - 62;
  double n = (sn > 0 ? num_.shifted_right(sn) : num_).to_double();
  double d = (sd > 0 ? den_.shifted_right(sd) : den_).to_double();
  return std::ldexp(n / d, (sn > 0 ? sn : 0) - (sd > 0 ? sd : 0));
}

std::string Rational::to_string() const {
  Rational r = *this;
  r.reduce();
  if (r.den_ == BigInt(1)) return r.num_.to_string();
  return r.num_.to_string() + "/" + r.den_.to_string();
}

}  // namespace carnot

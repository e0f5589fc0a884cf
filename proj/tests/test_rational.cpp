#include "doctest.h"

#include <cmath>

#include "carnot/poly.hpp"
#include "carnot/rational.hpp"

using namespace carnot;

TEST_CASE("bigint arithmetic round trips through strings") {
  BigInt a = BigInt::from_string("123456789012345678901234567890");
  BigInt b = BigInt::from_string("-987654321098765432109876543210");
  CHECK(a.to_string() == "123456789012345678901234567890");
  CHECK((a + b + (-a) + (-b)).is_zero());
  BigInt q, r;
  BigInt::divmod(b, a, q, r);
  CHECK((q * a + r) == b);
  CHECK(BigInt::gcd(BigInt(30030), BigInt(4862)) == BigInt(286));
}

TEST_CASE("bigint shifts and bit helpers") {
  BigInt one(1);
  CHECK(one.shifted_left(200).bit_length() == 201);
  CHECK(one.shifted_left(200).shifted_right(200) == one);
  CHECK(BigInt(48).trailing_zero_bits() == 4);
  CHECK(BigInt::pow2(100).to_double() == doctest::Approx(std::pow(2.0, 100)));
}

TEST_CASE("rational arithmetic is exact") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a * b == Rational(1, 18));
  CHECK(a - b == b);
  CHECK(a / b == Rational(2));
  CHECK((a - a).is_zero());
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(7, 3).to_string() == "7/3");
}

TEST_CASE("rational comparisons and pow") {
  CHECK(Rational(2, 3) < Rational(3, 4));
  CHECK(Rational(-5) < Rational(1, 1000000));
  CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
  CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
}

TEST_CASE("exact doubles and dyadic snapping") {
  CHECK(Rational::from_double_exact(0.25) == Rational(1, 4));
  CHECK(Rational::from_double_exact(-1.5) == Rational(-3, 2));
  double v = 0.1;
  CHECK(Rational::from_double_exact(v).to_double() == v);
  Rational s = Rational::snap(0.1000000003, 10);
  CHECK(std::fabs(s.to_double() - 0.1) < 1e-3);
  CHECK(Rational::snap(1.0, 20) == Rational(1));
}

TEST_CASE("parse accepts fractions and decimals") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-1.25") == Rational(-5, 4));
  CHECK(Rational::parse("12") == Rational(12));
}

TEST_CASE("exact nth roots") {
  CHECK(*Rational(4, 9).nth_root(2) == Rational(2, 3));
  CHECK(*Rational(27).nth_root(3) == Rational(3));
  CHECK(!Rational(2).nth_root(2).has_value());
  CHECK(!Rational(-1, 8).nth_root(3).has_value());  // sign handled by callers
  CHECK(*Rational(0).nth_root(5) == Rational(0));
}

TEST_CASE("to_double stays accurate on large fractions") {
  Rational big(BigInt::from_string("123456789123456789123456789"),
               BigInt::from_string("987654321987654321"));
  double expect = 1.23456789123456789123456789e26 / 9.87654321987654321e17;
  CHECK(big.to_double() == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("univariate polynomial calculus") {
  Poly1Q p(std::vector<Rational>{Rational(1), Rational(0), Rational(3)});  // 1 + 3t^2
  CHECK(p.eval(Rational(2)) == Rational(13));
  CHECK(p.derivative().eval(Rational(2)) == Rational(12));
  CHECK(p.antiderivative().eval(Rational(1)) == Rational(2));  // t + t^3
  Poly1Q q = p * p;
  CHECK(q.eval(Rational(2)) == Rational(169));
  CHECK((p - p).is_zero());
}

TEST_CASE("sparse polynomial algebra and evaluation") {
  // p = x0^2 y0 - 2 x1, over 4 vars (x0, x1, y0, y1)
  SparsePoly p(4);
  Monomial m1(4);
  m1.e[0] = 2;
  m1.e[2] = 1;
  p.add_term(m1, Rational(1));
  Monomial m2(4);
  m2.e[1] = 1;
  p.add_term(m2, Rational(-2));

  std::vector<Rational> at{Rational(3), Rational(5), Rational(2), Rational(0)};
  CHECK(p.eval(at) == Rational(8));
  std::vector<double> atd{3.0, 5.0, 2.0, 0.0};
  CHECK(p.eval(atd) == doctest::Approx(8.0));

  SparsePoly dp = p.derivative(0);
  CHECK(dp.eval(at) == Rational(12));

  // substitute y = 0 kills the first term
  std::vector<bool> zero{false, false, true, true};
  CHECK(p.substituted_zero(zero).eval(at) == Rational(-10));

  // composition with univariate polynomials: x0 = t, x1 = t^2, y0 = 1+t
  std::vector<Poly1Q> sub{
      Poly1Q(std::vector<Rational>{Rational(0), Rational(1)}),
      Poly1Q(std::vector<Rational>{Rational(0), Rational(0), Rational(1)}),
      Poly1Q(std::vector<Rational>{Rational(1), Rational(1)}),
      Poly1Q(std::vector<Rational>{Rational(0)})};
  Poly1Q c = p.eval1(sub);
  // t^2 (1 + t) - 2 t^2 = t^3 - t^2
  CHECK(c.eval(Rational(2)) == Rational(4));
  CHECK(c.degree() == 3);
}

TEST_CASE("derivative-of-product identity holds symbolically") {
  SparsePoly x0 = SparsePoly::variable(2, 0), x1 = SparsePoly::variable(2, 1);
  SparsePoly p = x0 * x1 + x0.scaled(Rational(3));
  SparsePoly lhs = (p * p).derivative(0);
  SparsePoly rhs = p.derivative(0) * p + p * p.derivative(0);
  CHECK((lhs - rhs).is_zero());
}

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// ============================================================================
// Univariate dense polynomials (curve coordinates, controls)
// ============================================================================

template <class S>
struct Poly1 {
  std::vector<S> c;  // ascending coefficients; exact zeros trimmed

  Poly1() = default;
  explicit Poly1(std::vector<S> coeffs) : c(std::move(coeffs)) { trim(); }
  static Poly1 constant(S v) { return Poly1(std::vector<S>{std::move(v)}); }

  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  void trim() {
    while (!c.empty() && c.back() == S(0)) c.pop_back();
  }

  S eval(const S& t) const {
    S acc(0);
    for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  }

  Poly1 derivative() const {
    Poly1 r;
    for (size_t i = 1; i < c.size(); ++i) r.c.push_back(c[i] * S(static_cast<long long>(i)));
    r.trim();
    return r;
  }

  Poly1 antiderivative() const {
    Poly1 r;
    if (c.empty()) return r;
    r.c.push_back(S(0));
    for (size_t i = 0; i < c.size(); ++i)
      r.c.push_back(c[i] / S(static_cast<long long>(i + 1)));
    r.trim();
    return r;
  }

  Poly1 operator+(const Poly1& o) const {
    Poly1 r;
    r.c.resize(std::max(c.size(), o.c.size()), S(0));
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] + o.c[i];
    r.trim();
    return r;
  }

  Poly1 operator-(const Poly1& o) const {
    Poly1 r;
    r.c.resize(std::max(c.size(), o.c.size()), S(0));
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] - o.c[i];
    r.trim();
    return r;
  }

  Poly1 operator*(const Poly1& o) const {
    Poly1 r;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, S(0));
    for (size_t i = 0; i < c.size(); ++i)
      for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = r.c[i + j] + c[i] * o.c[j];
    r.trim();
    return r;
  }

  Poly1 scaled(const S& k) const {
    Poly1 r = *this;
    for (auto& v : r.c) v = v * k;
    r.trim();
    return r;
  }

  /// p(t + shift)
  Poly1 shifted_arg(const S& shift) const {
    Poly1 r = constant(c.empty() ? S(0) : c.back());
    Poly1 lin(std::vector<S>{shift, S(1)});
    for (size_t i = c.size(); i-- > 1;) r = r * lin + constant(c[i - 1]);
    if (c.empty()) r = Poly1();
    return r;
  }
};

using Poly1Q = Poly1<Rational>;
using Poly1D = Poly1<double>;

Poly1D to_double_poly(const Poly1Q& p);

// ============================================================================
// Sparse multivariate polynomials with exact rational coefficients
// ============================================================================

/// Exponent vector over a fixed variable count. Group-law polynomials use
/// 2N variables (x then y); map components use N.
struct Monomial {
  std::vector<uint8_t> e;

  explicit Monomial(int nvars) : e(static_cast<size_t>(nvars), 0) {}
  int total_degree() const;
  /// Sum of w[v] * e[v].
  int weighted_degree(const std::vector<int>& w) const;
  bool operator<(const Monomial& o) const { return e < o.e; }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

class SparsePoly {
public:
  SparsePoly() = default;
  explicit SparsePoly(int nvars) : nvars_(nvars) {}
  static SparsePoly constant(int nvars, Rational v);
  static SparsePoly variable(int nvars, int v);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& coeff);

  SparsePoly operator+(const SparsePoly& o) const;
  SparsePoly operator-(const SparsePoly& o) const;
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly scaled(const Rational& k) const;
  SparsePoly operator-() const { return scaled(Rational(-1)); }

  SparsePoly derivative(int var) const;

  /// Substitute 0 for the flagged variables.
  SparsePoly substituted_zero(const std::vector<bool>& zero_var) const;

  /// Map old variable v to new_var[v] (>= 0) in a polynomial over new_nvars
  /// variables. Terms touching a variable mapped to -1 must not exist.
  SparsePoly reindexed(const std::vector<int>& new_var, int new_nvars) const;

  /// Substitute per-variable polynomials (multivariate composition).
  SparsePoly composed(const std::vector<SparsePoly>& sub) const;

  double eval(const std::vector<double>& x) const;
  Rational eval(const std::vector<Rational>& x) const;
  /// Composition with univariate polynomials per variable.
  template <class S>
  Poly1<S> eval1(const std::vector<Poly1<S>>& x) const;

  /// Highest exponent of variable v across terms.
  int max_exponent(int v) const;

  std::string to_string(const std::function<std::string(int)>& var_name) const;

private:
  int nvars_ = 0;
  std::map<Monomial, Rational> terms_;
};

template <class S>
S rational_cast(const Rational& r);
template <>
inline double rational_cast<double>(const Rational& r) {
  return r.to_double();
}
template <>
inline Rational rational_cast<Rational>(const Rational& r) {
  return r;
}

template <class S>
Poly1<S> SparsePoly::eval1(const std::vector<Poly1<S>>& x) const {
  Poly1<S> acc;
  for (const auto& [m, coeff] : terms_) {
    Poly1<S> t = Poly1<S>::constant(rational_cast<S>(coeff));
    for (int v = 0; v < nvars_; ++v)
      for (int k = 0; k < m.e[static_cast<size_t>(v)]; ++k) t = t * x[static_cast<size_t>(v)];
    acc = acc + t;
  }
  return acc;
}

}  // namespace carnot

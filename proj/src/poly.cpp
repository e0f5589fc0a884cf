#include "carnot/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace carnot {

Poly1D to_double_poly(const Poly1Q& p) {
  Poly1D r;
  r.c.reserve(p.c.size());
  for (const auto& q : p.c) r.c.push_back(q.to_double());
  return r;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

int Monomial::weighted_degree(const std::vector<int>& w) const {
  int d = 0;
  for (size_t i = 0; i < e.size(); ++i) d += w[i] * e[i];
  return d;
}

SparsePoly SparsePoly::constant(int nvars, Rational v) {
  SparsePoly p(nvars);
  p.add_term(Monomial(nvars), v);
  return p;
}

SparsePoly SparsePoly::variable(int nvars, int v) {
  SparsePoly p(nvars);
  Monomial m(nvars);
  m.e.at(static_cast<size_t>(v)) = 1;
  p.add_term(m, Rational(1));
  return p;
}

void SparsePoly::add_term(const Monomial& m, const Rational& coeff) {
  if (coeff.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, coeff);
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
  SparsePoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const {
  SparsePoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  SparsePoly r(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(nvars_);
      for (int v = 0; v < nvars_; ++v) {
        int e = ma.e[static_cast<size_t>(v)] + mb.e[static_cast<size_t>(v)];
        if (e > 255) throw std::overflow_error("SparsePoly: exponent overflow");
        m.e[static_cast<size_t>(v)] = static_cast<uint8_t>(e);
      }
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

SparsePoly SparsePoly::scaled(const Rational& k) const {
  SparsePoly r(nvars_);
  if (k.is_zero()) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * k);
  return r;
}

SparsePoly SparsePoly::derivative(int var) const {
  SparsePoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    int e = m.e[static_cast<size_t>(var)];
    if (e == 0) continue;
    Monomial d = m;
    d.e[static_cast<size_t>(var)] = static_cast<uint8_t>(e - 1);
    r.add_term(d, c * Rational(e));
  }
  return r;
}

SparsePoly SparsePoly::substituted_zero(const std::vector<bool>& zero_var) const {
  SparsePoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    bool vanishes = false;
    for (int v = 0; v < nvars_ && !vanishes; ++v)
      vanishes = zero_var[static_cast<size_t>(v)] && m.e[static_cast<size_t>(v)] > 0;
    if (!vanishes) r.add_term(m, c);
  }
  return r;
}

SparsePoly SparsePoly::reindexed(const std::vector<int>& new_var, int new_nvars) const {
  SparsePoly r(new_nvars);
  for (const auto& [m, c] : terms_) {
    Monomial nm(new_nvars);
    for (int v = 0; v < nvars_; ++v) {
      int e = m.e[static_cast<size_t>(v)];
      if (e == 0) continue;
      int nv = new_var[static_cast<size_t>(v)];
      if (nv < 0) throw std::invalid_argument("SparsePoly: reindex drops a live variable");
      int sum = nm.e[static_cast<size_t>(nv)] + e;
      if (sum > 255) throw std::overflow_error("SparsePoly: exponent overflow");
      nm.e[static_cast<size_t>(nv)] = static_cast<uint8_t>(sum);
    }
    r.add_term(nm, c);
  }
  return r;
}

SparsePoly SparsePoly::composed(const std::vector<SparsePoly>& sub) const {
  if (sub.empty()) throw std::invalid_argument("SparsePoly: empty substitution");
  int out_vars = sub.front().nvars();
  SparsePoly acc(out_vars);
  for (const auto& [m, c] : terms_) {
    SparsePoly t = SparsePoly::constant(out_vars, c);
    for (int v = 0; v < nvars_; ++v)
      for (int k = 0; k < m.e[static_cast<size_t>(v)]; ++k) t = t * sub[static_cast<size_t>(v)];
    acc = acc + t;
  }
  return acc;
}

double SparsePoly::eval(const std::vector<double>& x) const {
  // compensated (Kahan) summation over monomials
  double sum = 0.0, comp = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.to_double();
    for (int v = 0; v < nvars_; ++v) {
      int e = m.e[static_cast<size_t>(v)];
      for (int k = 0; k < e; ++k) t *= x[static_cast<size_t>(v)];
    }
    double y = t - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

Rational SparsePoly::eval(const std::vector<Rational>& x) const {
  Rational sum(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int v = 0; v < nvars_; ++v) {
      int e = m.e[static_cast<size_t>(v)];
      for (int k = 0; k < e; ++k) t *= x[static_cast<size_t>(v)];
    }
    sum += t;
  }
  return sum;
}

int SparsePoly::max_exponent(int v) const {
  int mx = 0;
  for (const auto& [m, c] : terms_) mx = std::max(mx, static_cast<int>(m.e[static_cast<size_t>(v)]));
  return mx;
}

std::string SparsePoly::to_string(const std::function<std::string(int)>& var_name) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational cc = c;
    cc.reduce();
    std::string coeff = cc.abs().to_string();
    if (first) {
      if (cc.sign() < 0) out += "-";
      first = false;
    } else {
      out += cc.sign() < 0 ? " - " : " + ";
    }
    std::string vars;
    for (int v = 0; v < nvars_; ++v) {
      int e = m.e[static_cast<size_t>(v)];
      if (e == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += var_name(v);
      if (e > 1) vars += "^" + std::to_string(e);
    }
    if (vars.empty()) {
      out += coeff;
    } else {
      if (coeff != "1") out += coeff + "*";
      out += vars;
    }
  }
  return out;
}

}  // namespace carnot

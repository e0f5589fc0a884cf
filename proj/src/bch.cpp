#include "carnot/bch.hpp"

#include <stdexcept>

namespace carnot {

namespace {

// Lie-algebra element whose coefficients are polynomials in (x, y).
using LieVec = std::vector<SparsePoly>;

LieVec lie_zero(int dim, int nvars) {
  return LieVec(static_cast<size_t>(dim), SparsePoly(nvars));
}

LieVec lie_bracket(const CarnotAlgebra& alg, const LieVec& a, const LieVec& b) {
  LieVec out = lie_zero(alg.strat.total_dim, a.front().nvars());
  for (const auto& [ijk, c] : alg.constants.entries()) {
    auto [i, j, k] = ijk;
    bool mirror_stored = alg.constants.entries().count({j, i, k}) != 0;
    SparsePoly term = a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
    if (!mirror_stored)
      term = term - a[static_cast<size_t>(j)] * b[static_cast<size_t>(i)];
    out[static_cast<size_t>(k)] = out[static_cast<size_t>(k)] + term.scaled(c);
  }
  return out;
}

long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Right-nested bracket of a word over the letters {X, Y}:
// [w0, [w1, [..., [w_{r-2}, w_{r-1}]...]]].
LieVec nested_bracket(const CarnotAlgebra& alg, const std::vector<bool>& is_y,
                      const LieVec& x, const LieVec& y) {
  LieVec acc = is_y.back() ? y : x;
  for (size_t i = is_y.size() - 1; i-- > 0;) acc = lie_bracket(alg, is_y[i] ? y : x, acc);
  return acc;
}

// All Dynkin blocks ((p_1,q_1),...,(p_m,q_m)), p_i + q_i >= 1, with total
// letter count up to max_weight; invokes f on each.
void for_each_block_sequence(int max_weight,
                             const std::function<void(const std::vector<std::pair<int, int>>&)>& f) {
  std::vector<std::pair<int, int>> seq;
  std::function<void(int)> rec = [&](int remaining) {
    if (!seq.empty()) f(seq);
    for (int p = 0; p <= remaining; ++p) {
      for (int q = 0; q <= remaining - p; ++q) {
        if (p + q == 0) continue;
        seq.push_back({p, q});
        rec(remaining - p - q);
        seq.pop_back();
      }
    }
  };
  rec(max_weight);
}

}  // namespace

GroupLaw compute_group_law(std::shared_ptr<const CarnotAlgebra> algebra) {
  const auto& alg = *algebra;
  const int dim = alg.strat.total_dim;
  const int n = alg.strat.horizontal_dim;
  const int step = alg.strat.step;
  const int nvars = 2 * dim;

  LieVec x = lie_zero(dim, nvars), y = lie_zero(dim, nvars);
  for (int i = 0; i < dim; ++i) {
    x[static_cast<size_t>(i)] = SparsePoly::variable(nvars, i);
    y[static_cast<size_t>(i)] = SparsePoly::variable(nvars, dim + i);
  }

  LieVec z = lie_zero(dim, nvars);
  for_each_block_sequence(step, [&](const std::vector<std::pair<int, int>>& seq) {
    int m = static_cast<int>(seq.size());
    int weight = 0;
    long long fact = 1;
    std::vector<bool> word;
    for (const auto& [p, q] : seq) {
      weight += p + q;
      fact *= factorial(p) * factorial(q);
      for (int i = 0; i < p; ++i) word.push_back(false);
      for (int i = 0; i < q; ++i) word.push_back(true);
    }
    if (weight > step) return;
    Rational coeff(m % 2 == 1 ? 1 : -1, static_cast<long long>(m) * weight * fact);
    LieVec term = nested_bracket(alg, word, x, y);
    for (int i = 0; i < dim; ++i)
      z[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + term[static_cast<size_t>(i)].scaled(coeff);
  });

  GroupLaw law;
  law.algebra = std::move(algebra);
  law.q.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    SparsePoly qi = z[static_cast<size_t>(i)] - SparsePoly::variable(nvars, i) -
                    SparsePoly::variable(nvars, dim + i);
    law.q.push_back(std::move(qi));
  }

  // horizontal frame ingredients: dQ_i/dy_j at y = 0, reindexed to x-only
  std::vector<bool> y_vars(static_cast<size_t>(nvars), false);
  for (int v = dim; v < nvars; ++v) y_vars[static_cast<size_t>(v)] = true;
  std::vector<int> x_only(static_cast<size_t>(nvars), -1);
  for (int v = 0; v < dim; ++v) x_only[static_cast<size_t>(v)] = v;
  law.y_gradient_at_zero.assign(static_cast<size_t>(dim), {});
  for (int i = 0; i < dim; ++i) {
    auto& row = law.y_gradient_at_zero[static_cast<size_t>(i)];
    row.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      SparsePoly g = law.q[static_cast<size_t>(i)].derivative(dim + j).substituted_zero(y_vars);
      row.push_back(g.reindexed(x_only, dim));
    }
  }
  return law;
}

std::string GroupLaw::q_to_string(int i) const {
  const int dim = algebra->strat.total_dim;
  return q[static_cast<size_t>(i)].to_string([dim](int v) {
    return v < dim ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - dim + 1);
  });
}

LawCheck verify_group_law(const GroupLaw& law) {
  const auto& strat = law.algebra->strat;
  const int dim = strat.total_dim;
  const int n = strat.horizontal_dim;
  const int nvars = 2 * dim;
  LawCheck check;

  auto witness = [&](const std::string& what, int i) {
    if (!check.witness) check.witness = what + " fails for Q_" + std::to_string(i + 1);
  };

  // (1) horizontal components vanish
  for (int i = 0; i < n; ++i) {
    if (!law.q[static_cast<size_t>(i)].is_zero()) {
      check.horizontal_vanishes = false;
      witness("horizontal vanishing", i);
    }
  }

  // (2) assertable consequences of the antisymmetric-factor structure
  std::vector<bool> xs(static_cast<size_t>(nvars), false), ys(static_cast<size_t>(nvars), false);
  std::vector<int> diag(static_cast<size_t>(nvars));
  for (int v = 0; v < dim; ++v) {
    xs[static_cast<size_t>(v)] = true;
    ys[static_cast<size_t>(v + dim)] = true;
    diag[static_cast<size_t>(v)] = v;
    diag[static_cast<size_t>(v + dim)] = v;
  }
  for (int i = n; i < dim; ++i) {
    const auto& qi = law.q[static_cast<size_t>(i)];
    if (!qi.substituted_zero(ys).is_zero() || !qi.substituted_zero(xs).is_zero() ||
        !qi.reindexed(diag, dim).is_zero()) {
      check.axis_diagonal_vanish = false;
      witness("axis/diagonal vanishing", i);
    }
  }

  // (3) dilation homogeneity: weighted degree of each monomial equals d_i
  std::vector<int> weights(static_cast<size_t>(nvars));
  for (int v = 0; v < dim; ++v) {
    weights[static_cast<size_t>(v)] = strat.degree[static_cast<size_t>(v)];
    weights[static_cast<size_t>(v + dim)] = strat.degree[static_cast<size_t>(v)];
  }
  for (int i = 0; i < dim; ++i) {
    for (const auto& [m, c] : law.q[static_cast<size_t>(i)].terms()) {
      if (m.weighted_degree(weights) != strat.degree[static_cast<size_t>(i)]) {
        check.homogeneous = false;
        witness("dilation homogeneity", i);
      }
    }
  }

  // (4) Q_i depends only on coordinates of degree < d_i
  for (int i = 0; i < dim; ++i) {
    int di = strat.degree[static_cast<size_t>(i)];
    for (const auto& [m, c] : law.q[static_cast<size_t>(i)].terms()) {
      for (int v = 0; v < nvars; ++v) {
        if (m.e[static_cast<size_t>(v)] > 0 && weights[static_cast<size_t>(v)] >= di) {
          check.lower_degree_only = false;
          witness("lower-degree dependence", i);
        }
      }
    }
  }

  return check;
}

}  // namespace carnot

#include "carnot/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace carnot {

namespace {

std::vector<Rational> basis_vector(int dim, int i) {
  std::vector<Rational> v(static_cast<size_t>(dim), Rational(0));
  v[static_cast<size_t>(i)] = Rational(1);
  return v;
}

int matrix_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  size_t cols = rows.front().size();
  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows.size(); ++col) {
    size_t pivot = row;
    while (pivot < rows.size() && rows[pivot][col].is_zero()) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[row], rows[pivot]);
    for (size_t r = row + 1; r < rows.size(); ++r) {
      if (rows[r][col].is_zero()) continue;
      Rational f = rows[r][col] / rows[row][col];
      for (size_t c = col; c < cols; ++c) rows[r][c] -= f * rows[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

// exact inverse, throws on singular input
std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> m) {
  size_t n = m.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw std::logic_error("decomposition: singular layer system");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    Rational p = m[col][col];
    for (size_t c = 0; c < n; ++c) {
      m[col][c] /= p;
      inv[col][c] /= p;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      Rational f = m[r][col];
      for (size_t c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

template <class S>
S signed_root(const S& value, int m);

template <>
double signed_root<double>(const double& value, int m) {
  double r = std::pow(std::fabs(value), 1.0 / m);
  return value < 0 ? -r : r;
}

template <>
Rational signed_root<Rational>(const Rational& value, int m) {
  auto root = value.abs().nth_root(m);
  if (!root)
    throw DecompositionError("exact decomposition needs a rational root of " + value.to_string(),
                             0.0);
  return value.sign() < 0 ? -*root : *root;
}

template <class S>
S power(const S& v, int e) {
  S acc(1);
  for (int i = 0; i < e; ++i) acc = acc * v;
  return acc;
}

}  // namespace

LayerBracketBasis layer_bracket_basis(const CarnotAlgebra& algebra, int m) {
  const auto& strat = algebra.strat;
  const auto& sc = algebra.constants;
  const int start = strat.layer_start(m);
  const int size = strat.layer_size(m);
  LayerBracketBasis basis;
  std::vector<std::vector<Rational>> chosen;  // bracket vectors restricted to layer m
  const int pstart = strat.layer_start(m - 1);
  for (int j = 0; j < strat.horizontal_dim && static_cast<int>(chosen.size()) < size; ++j) {
    for (int k = pstart; k < pstart + strat.layer_size(m - 1); ++k) {
      auto w = sc.bracket(basis_vector(strat.total_dim, j), basis_vector(strat.total_dim, k));
      std::vector<Rational> restricted(w.begin() + start, w.begin() + start + size);
      auto trial = chosen;
      trial.push_back(restricted);
      if (matrix_rank(trial) == static_cast<int>(trial.size())) {
        chosen.push_back(std::move(restricted));
        basis.pairs.push_back({j, k});
        if (static_cast<int>(chosen.size()) == size) break;
      }
    }
  }
  if (static_cast<int>(chosen.size()) < size)
    throw std::logic_error("layer bracket basis incomplete at layer " + std::to_string(m) +
                           " (algebra not validated?)");
  // columns of the layer system are the chosen bracket vectors
  std::vector<std::vector<Rational>> w(static_cast<size_t>(size),
                                       std::vector<Rational>(static_cast<size_t>(size)));
  for (int t = 0; t < size; ++t)
    for (int r = 0; r < size; ++r) w[static_cast<size_t>(t)][static_cast<size_t>(r)] =
        chosen[static_cast<size_t>(r)][static_cast<size_t>(t)];
  basis.inverse = invert(std::move(w));
  return basis;
}

DecompositionScheme DecompositionScheme::build(std::shared_ptr<const CarnotGroup> group) {
  DecompositionScheme scheme;
  scheme.group_ = std::move(group);
  const auto& g = *scheme.group_;
  const auto& strat = g.strat();

  for (int m = 2; m <= strat.step; ++m) {
    auto basis = layer_bracket_basis(g.algebra(), m);
    LayerSolve solve;
    solve.pairs = std::move(basis.pairs);
    solve.inverse = std::move(basis.inverse);
    scheme.layers_.push_back(std::move(solve));
  }

  // expand once with zero amplitudes to fix k0 and the direction template
  auto probe = scheme.decompose_impl<double>(VecD(static_cast<size_t>(strat.total_dim), 0.0));
  scheme.k0_ = static_cast<int>(probe.letters.size());
  scheme.template_dirs_.reserve(probe.letters.size());
  for (const auto& letter : probe.letters) scheme.template_dirs_.push_back(letter.direction);
  return scheme;
}

template <class S>
void DecompositionScheme::emit_direction(int k, const S& scale,
                                         std::vector<BasicWordLetter<S>>& out) const {
  const auto& strat = group_->strat();
  int m = strat.degree[static_cast<size_t>(k)];
  if (m == 1) {
    out.push_back({k, scale});
    return;
  }
  int start = strat.layer_start(m);
  std::vector<S> target(static_cast<size_t>(strat.layer_size(m)), S(0));
  target[static_cast<size_t>(k - start)] = scale;
  emit_layer(m, target, out);
}

template <class S>
void DecompositionScheme::emit_layer(int m, const std::vector<S>& target,
                                     std::vector<BasicWordLetter<S>>& out) const {
  const auto& solve = layers_[static_cast<size_t>(m - 2)];
  const size_t size = target.size();
  for (size_t r = 0; r < solve.pairs.size(); ++r) {
    S alpha(0);
    for (size_t t = 0; t < size; ++t)
      alpha = alpha + rational_cast<S>(solve.inverse[r][t]) * target[t];
    auto [j, k] = solve.pairs[r];
    // commutator block: exp(a e_j) * inner * exp(-a e_j) * inner^{-1}
    // realizes alpha * [X_j, X_k] exactly in layer m; output is odd in a.
    S a = signed_root(alpha, m);
    S abs_root(0);  // |alpha|^{1/m}
    if constexpr (std::is_same_v<S, double>) {
      abs_root = std::fabs(a);
    } else {
      abs_root = a.abs();
    }
    S b = power(abs_root, m - 1);  // inner block realizes |alpha|^{(m-1)/m} e_k
    std::vector<BasicWordLetter<S>> inner;
    emit_direction(k, b, inner);
    out.push_back({j, a});
    out.insert(out.end(), inner.begin(), inner.end());
    out.push_back({j, -a});
    for (size_t i = inner.size(); i-- > 0;) out.push_back({inner[i].direction, -inner[i].amplitude});
  }
}

template <class S>
BasicWord<S> DecompositionScheme::decompose_impl(const std::vector<S>& xi) const {
  const auto& g = *group_;
  const auto& strat = g.strat();
  const int n = strat.horizontal_dim;

  // generator letters, product order (n-1, ..., 0): G = (xi_n e_n)...(xi_1 e_1)
  std::vector<BasicWordLetter<S>> generators;
  for (int j = n - 1; j >= 0; --j) generators.push_back({j, xi[static_cast<size_t>(j)]});
  std::vector<S> g_prod = word_product(g, generators);
  std::vector<S> residual = g.multiply(xi, g.inverse(g_prod));

  // peel layers in degree order; blocks of layer m only touch layers >= m,
  // so each layer's coordinates are an exact linear image of its amplitudes
  std::vector<BasicWordLetter<S>> blocks;
  for (int m = 2; m <= strat.step; ++m) {
    int start = strat.layer_start(m);
    int size = strat.layer_size(m);
    std::vector<S> target(residual.begin() + start, residual.begin() + start + size);
    std::vector<BasicWordLetter<S>> layer_letters;
    emit_layer(m, target, layer_letters);
    std::vector<S> layer_prod = word_product(g, layer_letters);
    residual = g.multiply(residual, g.inverse(layer_prod));
    blocks.insert(blocks.begin(), layer_letters.begin(), layer_letters.end());
  }

  BasicWord<S> word;
  word.letters = std::move(blocks);
  word.letters.insert(word.letters.end(), generators.begin(), generators.end());
  word.product = word_product(g, word.letters);

  double resid = 0.0;
  for (int i = 0; i < strat.total_dim; ++i) {
    S diff = word.product[static_cast<size_t>(i)] - xi[static_cast<size_t>(i)];
    if constexpr (std::is_same_v<S, double>) {
      resid = std::max(resid, std::fabs(diff));
    } else {
      resid = std::max(resid, std::fabs(diff.to_double()));
    }
  }
  word.residual_inf = resid;
  return word;
}

HorizontalWord DecompositionScheme::decompose(const VecD& xi) const {
  auto word = decompose_impl<double>(xi);
  double tol = 1e-10 * (1.0 + inf_norm(xi));
  if (word.residual_inf > tol)
    throw DecompositionError("decomposition residual " + std::to_string(word.residual_inf) +
                                 " above tolerance",
                             word.residual_inf);
  return word;
}

HorizontalWordQ DecompositionScheme::decompose_exact(const VecQ& xi) const {
  return decompose_impl<Rational>(xi);
}

HorizontalWordQ DecompositionScheme::decompose_snapped(const VecD& xi, int significant_bits) const {
  auto word = decompose_impl<double>(xi);
  HorizontalWordQ snapped;
  snapped.letters.reserve(word.letters.size());
  for (const auto& letter : word.letters)
    snapped.letters.push_back({letter.direction, Rational::snap(letter.amplitude, significant_bits)});
  snapped.product = word_product(*group_, snapped.letters);
  double resid = 0.0;
  for (int i = 0; i < group_->dim(); ++i)
    resid = std::max(resid, std::fabs(snapped.product[static_cast<size_t>(i)].to_double() -
                                      xi[static_cast<size_t>(i)]));
  snapped.residual_inf = resid;
  return snapped;
}

DecompositionScheme::Constants DecompositionScheme::estimate_constants(long sphere_samples,
                                                                       uint64_t seed) const {
  Rng rng(seed);
  const int dim = group_->dim();
  Constants out;
  out.k0 = k0_;
  out.samples = sphere_samples;
  out.seed = seed;
  for (long it = 0; it < sphere_samples; ++it) {
    VecD xi(static_cast<size_t>(dim));
    double norm2 = 0.0;
    for (auto& v : xi) {
      v = rng.gaussian();
      norm2 += v * v;
    }
    if (norm2 < 1e-12) continue;
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : xi) v *= inv;
    auto word = decompose(xi);
    for (const auto& letter : word.letters)
      out.c0 = std::max(out.c0, std::fabs(letter.amplitude));
  }
  out.c0 = std::max(out.c0, 1.0);
  return out;
}

double sup_euclidean_on_unit_sphere(const CarnotGroup& group, long samples, uint64_t seed) {
  Rng rng(seed);
  double sup = 0.0;
  // deterministic probes: normalized basis directions
  for (int i = 0; i < group.dim(); ++i) {
    VecD e(static_cast<size_t>(group.dim()), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    double nv = group.norm_value(e);
    sup = std::max(sup, euclidean_norm(group.dilate(1.0 / nv, e)));
  }
  for (long it = 0; it < samples; ++it)
    sup = std::max(sup, euclidean_norm(group.random_unit_sphere(rng)));
  return sup;
}

// explicit instantiations
template BasicWord<double> DecompositionScheme::decompose_impl<double>(const VecD&) const;
template BasicWord<Rational> DecompositionScheme::decompose_impl<Rational>(const VecQ&) const;

}  // namespace carnot

#pragma once

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

template <class S>
struct BasicWordLetter {
  int direction;  // 0-based horizontal direction
  S amplitude;
};

/// Word of horizontal letters xi_{k0} ... xi_1, stored in product order
/// (letters[0] is the leftmost factor xi_{k0}).
template <class S>
struct BasicWord {
  std::vector<BasicWordLetter<S>> letters;
  std::vector<S> product;
  double residual_inf = 0.0;  // |product - target|_inf at decomposition time
};

using HorizontalWord = BasicWord<double>;
using HorizontalWordQ = BasicWord<Rational>;

class DecompositionError : public std::runtime_error {
public:
  DecompositionError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

template <class S>
std::vector<S> letter_element(const CarnotGroup& group, const BasicWordLetter<S>& letter) {
  std::vector<S> v(static_cast<size_t>(group.dim()), S(0));
  v[static_cast<size_t>(letter.direction)] = letter.amplitude;
  return v;
}

template <class S>
std::vector<S> word_product(const CarnotGroup& group,
                            const std::vector<BasicWordLetter<S>>& letters) {
  std::vector<S> acc = group.identity<S>();
  for (const auto& letter : letters) acc = group.multiply(acc, letter_element(group, letter));
  return acc;
}

/// Fixed per-group factorization template: one letter per generator, then
/// for each higher basis direction a commutator block of generator
/// letters that realizes it exactly at the origin. Amplitudes are the
/// only free parameters; they solve layer by layer through exact linear
/// systems over Q, so the factorization is triangular and deterministic.
class DecompositionScheme {
public:
  static DecompositionScheme build(std::shared_ptr<const CarnotGroup> group);

  const CarnotGroup& group() const { return *group_; }
  std::shared_ptr<const CarnotGroup> group_ptr() const { return group_; }
  int word_length() const { return k0_; }
  /// Directions of the fixed template, product order.
  const std::vector<int>& template_directions() const { return template_dirs_; }

  HorizontalWord decompose(const VecD& xi) const;
  /// Exact factorization; throws DecompositionError when a block
  /// amplitude's m-th root is irrational.
  HorizontalWordQ decompose_exact(const VecQ& xi) const;
  /// Double factorization with amplitudes snapped to dyadic rationals;
  /// the returned word and its product are exact. The product lands
  /// within ~2^-bits of xi and is the right object to feed exact-mode
  /// studies.
  HorizontalWordQ decompose_snapped(const VecD& xi, int significant_bits) const;

  struct Constants {
    int k0 = 0;
    double c0 = 0.0;  // max letter amplitude over the Euclidean unit sphere
    long samples = 0;
    uint64_t seed = 0;
  };
  Constants estimate_constants(long sphere_samples, uint64_t seed) const;

private:
  struct LayerSolve {
    std::vector<std::pair<int, int>> pairs;        // (generator j, basis direction k)
    std::vector<std::vector<Rational>> inverse;    // amplitudes = inverse * layer residual
  };

  std::shared_ptr<const CarnotGroup> group_;
  std::vector<LayerSolve> layers_;  // index m-2 for layer m
  int k0_ = 0;
  std::vector<int> template_dirs_;

  template <class S>
  BasicWord<S> decompose_impl(const std::vector<S>& xi) const;
  template <class S>
  void emit_direction(int k, const S& scale, std::vector<BasicWordLetter<S>>& out) const;
  template <class S>
  void emit_layer(int m, const std::vector<S>& target,
                  std::vector<BasicWordLetter<S>>& out) const;
};

/// Sampled sup of the Euclidean norm over the homogeneous-norm unit
/// sphere (includes the normalized +-basis directions deterministically).
double sup_euclidean_on_unit_sphere(const CarnotGroup& group, long samples, uint64_t seed);

/// Bracket pairs (generator j, layer-(m-1) direction k) whose brackets
/// form a basis of layer m, with the exact inverse of that basis matrix.
/// Exists for every validated algebra by the generation invariant; shared
/// by the factorization template and graded-homomorphism extension.
struct LayerBracketBasis {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<Rational>> inverse;  // coefficients = inverse * layer vector
};
LayerBracketBasis layer_bracket_basis(const CarnotAlgebra& algebra, int m);

}  // namespace carnot

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/poly.hpp"

namespace carnot {

/// The group law in exponential coordinates: x * y = x + y + Q(x, y),
/// where Q is the vector of correction polynomials produced by the
/// truncated Baker-Campbell-Hausdorff series. Variables 0..N-1 are the x
/// coordinates, N..2N-1 the y coordinates.
struct GroupLaw {
  std::shared_ptr<const CarnotAlgebra> algebra;
  std::vector<SparsePoly> q;  // N polynomials in 2N variables

  /// d(Q_i)/d(y_j) at y = 0, as a polynomial in x alone (N variables).
  /// Precomputed for i = 0..N-1, j = 0..n-1; this is the non-trivial part
  /// of the left-invariant horizontal frame X_j(x) = e_j + dQ/dy_j(x, 0).
  std::vector<std::vector<SparsePoly>> y_gradient_at_zero;

  std::string q_to_string(int i) const;
};

/// Expands log(exp x * exp y) - x - y through the Dynkin (commutator) form
/// of the BCH series, truncated at bracket depth = step. Exact rational
/// coefficients; terms beyond the step vanish by nilpotency.
GroupLaw compute_group_law(std::shared_ptr<const CarnotAlgebra> algebra);

/// Structural checks on the computed law, all symbolic:
///   1. Q_i = 0 on the horizontal layer,
///   2. Q_i(x,0) = Q_i(0,y) = Q_i(x,x) = 0 (the assertable consequences of
///      the antisymmetric-factor form),
///   3. every monomial of Q_i has dilation-weighted degree d_i,
///   4. Q_i only involves coordinates of degree < d_i.
struct LawCheck {
  bool horizontal_vanishes = true;
  bool axis_diagonal_vanish = true;
  bool homogeneous = true;
  bool lower_degree_only = true;
  std::optional<std::string> witness;

  bool pass() const {
    return horizontal_vanishes && axis_diagonal_vanish && homogeneous && lower_degree_only;
  }
};

LawCheck verify_group_law(const GroupLaw& law);

}  // namespace carnot

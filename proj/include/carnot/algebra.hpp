#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

/// Layer structure of a stratified Lie algebra: dimensions of V_1..V_s in
/// an adapted basis, with the induced coordinate degrees. The adapted
/// (layer-by-layer) basis order is the canonical coordinate order for
/// everything downstream.
struct Stratification {
  std::vector<int> layer_dims;
  int total_dim = 0;       // N
  int horizontal_dim = 0;  // n = dim V_1
  int step = 0;            // s
  std::vector<int> degree;  // degree[i] for coordinate i (0-based), values 1..s

  static Stratification make(std::vector<int> layer_dims);

  int layer_start(int m) const;  // first 0-based index of layer m (1-based m)
  int layer_size(int m) const { return layer_dims[static_cast<size_t>(m - 1)]; }
};

/// Sparse bracket table: [X_i, X_j] = sum_k c[i][j][k] X_k with exact
/// rational entries. Entries are stored as given; lookups complete the
/// table antisymmetrically when only one orientation is present.
class StructureConstants {
public:
  explicit StructureConstants(int dim) : dim_(dim) {}

  int dim() const { return dim_; }

  /// Throws std::out_of_range on bad indices (structural error, distinct
  /// from invariant failures reported by validate()).
  void set(int i, int j, int k, const Rational& value);

  const std::map<std::tuple<int, int, int>, Rational>& entries() const { return entries_; }

  /// Antisymmetrically-completed coefficient.
  Rational effective(int i, int j, int k) const;

  /// Bracket of numeric vectors through the completed table.
  std::vector<Rational> bracket(const std::vector<Rational>& a,
                                const std::vector<Rational>& b) const;

private:
  int dim_;
  std::map<std::tuple<int, int, int>, Rational> entries_;
};

struct CarnotAlgebra {
  std::string name;
  Stratification strat;
  StructureConstants constants;
};

struct ValidationIssue {
  std::string invariant;  // "antisymmetry" | "jacobi" | "grading" | "generation"
  std::vector<int> witness;  // offending indices (1-based, as in the file format)
  std::string detail;
};

struct ValidationReport {
  bool antisymmetry = true;
  bool jacobi = true;
  bool grading = true;
  bool generation = true;
  std::vector<ValidationIssue> issues;

  bool pass() const { return antisymmetry && jacobi && grading && generation; }
};

/// Checks the four structure-constant invariants exactly over Q.
ValidationReport validate(const CarnotAlgebra& algebra);

/// Named algebras: "heisenberg(m)" for m >= 1, "engel",
/// "free_nilpotent(2,3)". Throws std::invalid_argument on unknown names.
/// Every returned algebra passes validate().
CarnotAlgebra catalog(const std::string& name);

/// Step-1 abelian algebra on n generators (test/reference helper; not a
/// catalog name).
CarnotAlgebra abelian_algebra(int n);

/// Loads the plain-text JSON definition: {"layer_dims": [...],
/// "brackets": [[i, j, k, num, den], ...]} with 1-based indices.
CarnotAlgebra load_algebra_json(const std::string& path);

}  // namespace carnot

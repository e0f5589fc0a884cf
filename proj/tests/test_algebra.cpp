#include "doctest.h"

#include "carnot/algebra.hpp"

using namespace carnot;

TEST_CASE("stratification shape and degrees") {
  auto s = Stratification::make({2, 1, 1});
  CHECK(s.total_dim == 4);
  CHECK(s.horizontal_dim == 2);
  CHECK(s.step == 3);
  CHECK(s.degree == std::vector<int>{1, 1, 2, 3});
  CHECK(s.layer_start(2) == 2);
  CHECK(s.layer_start(3) == 3);
  CHECK_THROWS_AS(Stratification::make({}), std::invalid_argument);
  CHECK_THROWS_AS(Stratification::make({2, 0}), std::invalid_argument);
}

TEST_CASE("heisenberg validates") {
  auto h1 = catalog("heisenberg(1)");
  CHECK(h1.strat.total_dim == 3);
  CHECK(h1.strat.horizontal_dim == 2);
  CHECK(h1.strat.step == 2);
  CHECK(h1.strat.degree == std::vector<int>{1, 1, 2});
  CHECK(validate(h1).pass());
}

TEST_CASE("engel and free nilpotent validate") {
  auto engel = catalog("engel");
  CHECK(engel.strat.degree == std::vector<int>{1, 1, 2, 3});
  CHECK(validate(engel).pass());

  auto fn = catalog("free_nilpotent(2,3)");
  CHECK(fn.strat.total_dim == 5);
  CHECK(fn.strat.degree == std::vector<int>{1, 1, 2, 3, 3});
  CHECK(validate(fn).pass());

  auto h2 = catalog("heisenberg(2)");
  CHECK(h2.strat.total_dim == 5);
  CHECK(validate(h2).pass());

  CHECK_THROWS_AS(catalog("so(3)"), std::invalid_argument);
}

TEST_CASE("abelian layers declared as step 2 fail generation") {
  // declares V2 but provides no brackets to span it
  CarnotAlgebra a{"fake", Stratification::make({2, 1}), StructureConstants(3)};
  auto report = validate(a);
  CHECK_FALSE(report.pass());
  CHECK_FALSE(report.generation);
  CHECK(report.antisymmetry);
  CHECK(report.jacobi);
  bool found = false;
  for (const auto& issue : report.issues) found |= issue.invariant == "generation";
  CHECK(found);
}

TEST_CASE("explicit mirror entries must be antisymmetric") {
  CarnotAlgebra a{"bad", Stratification::make({2, 1}), StructureConstants(3)};
  a.constants.set(0, 1, 2, Rational(1));
  a.constants.set(1, 0, 2, Rational(1));  // should be -1
  auto report = validate(a);
  CHECK_FALSE(report.antisymmetry);
}

TEST_CASE("grading violations are caught") {
  CarnotAlgebra a{"bad", Stratification::make({2, 1}), StructureConstants(3)};
  a.constants.set(0, 2, 1, Rational(1));  // deg 1 + deg 2 landing in deg 1
  auto report = validate(a);
  CHECK_FALSE(report.grading);
}

TEST_CASE("jacobi violations are caught") {
  // step-2 layer structure with three horizontal directions and two
  // vertical ones; brackets chosen to break Jacobi? With step 2 every
  // double bracket lands in degree >= 3 = 0, so use a step-3 shape.
  CarnotAlgebra a{"bad", Stratification::make({3, 1, 1}), StructureConstants(5)};
  a.constants.set(0, 1, 3, Rational(1));
  a.constants.set(0, 3, 4, Rational(1));
  a.constants.set(1, 3, 4, Rational(1));
  a.constants.set(2, 1, 3, Rational(1));
  // [x2,[x0,x1]] = 1*X4 but the cyclic sum does not cancel
  auto report = validate(a);
  CHECK_FALSE(report.jacobi);
}

TEST_CASE("malformed table indices raise a structural error") {
  StructureConstants sc(3);
  CHECK_THROWS_AS(sc.set(0, 1, 3, Rational(1)), std::out_of_range);
  CHECK_THROWS_AS(sc.set(-1, 1, 2, Rational(1)), std::out_of_range);
}

TEST_CASE("nilpotency: an (s+1)-fold bracket vanishes exactly") {
  auto engel = catalog("engel");
  const auto& sc = engel.constants;
  auto e = [&](int i) {
    std::vector<Rational> v(4, Rational(0));
    v[static_cast<size_t>(i)] = Rational(1);
    return v;
  };
  // [X1, [X1, [X1, X2]]] has bracket depth 4 > s = 3
  auto b = sc.bracket(e(0), sc.bracket(e(0), sc.bracket(e(0), e(1))));
  for (const auto& c : b) CHECK(c.is_zero());
}

TEST_CASE("abelian helper is a valid step-1 algebra") {
  auto a = abelian_algebra(3);
  CHECK(a.strat.step == 1);
  CHECK(validate(a).pass());
}

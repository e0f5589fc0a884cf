#include "doctest.h"

#include <cmath>

#include "carnot/decomposition.hpp"
#include "carnot/horizontal.hpp"

using namespace carnot;

namespace {

std::shared_ptr<CarnotGroup> h1() {
  static auto g = make_calibrated_group("heisenberg(1)", 20000, 0xbead);
  return g;
}

const DecompositionScheme& h1_scheme() {
  static auto scheme = DecompositionScheme::build(h1());
  return scheme;
}

}  // namespace

TEST_CASE("template shapes: generators plus commutator blocks") {
  CHECK(h1_scheme().word_length() == 6);

  auto g2 = make_calibrated_group("heisenberg(2)", 8000, 0x2bed);
  CHECK(DecompositionScheme::build(g2).word_length() == 8);  // 4 generators + rectangle

  auto engel = make_calibrated_group("engel", 8000, 0x3bed);
  auto engel_scheme = DecompositionScheme::build(engel);
  CHECK(engel_scheme.word_length() == 16);  // 2 + 4 + (1 + 4 + 1 + 4)

  auto fn = make_calibrated_group("free_nilpotent(2,3)", 8000, 0x4bed);
  CHECK(DecompositionScheme::build(fn).word_length() == 26);

  // every template letter is a first-layer direction
  for (int dir : engel_scheme.template_directions()) {
    CHECK(dir >= 0);
    CHECK(dir < 2);
  }
  CHECK(static_cast<int>(engel_scheme.template_directions().size()) >= engel->horizontal_dim());
}

TEST_CASE("abelian factorization collapses to the generators") {
  auto g = make_group(abelian_algebra(3));
  g->set_norm(calibrate_norm(*g, 2000, 0x771));
  auto scheme = DecompositionScheme::build(g);
  CHECK(scheme.word_length() == 3);
  auto word = scheme.decompose(VecD{0.5, -2.0, 0.25});
  CHECK(word.residual_inf == 0.0);
  CHECK(word.letters[0].amplitude == doctest::Approx(0.25));   // product order: e3 first
  CHECK(word.letters[2].amplitude == doctest::Approx(0.5));

  auto constants = scheme.estimate_constants(2000, 0x5eed);
  CHECK(constants.c0 == doctest::Approx(1.0));
}

TEST_CASE("rectangle identity: the vertical direction factors exactly") {
  VecQ target{Rational(0), Rational(0), Rational(1)};
  auto word = h1_scheme().decompose_exact(target);
  REQUIRE(word.letters.size() == 6);
  // generator letters vanish; the rectangle runs with unit amplitudes
  std::vector<std::pair<int, Rational>> nonzero;
  for (const auto& letter : word.letters)
    if (!letter.amplitude.is_zero()) nonzero.push_back({letter.direction, letter.amplitude});
  REQUIRE(nonzero.size() == 4);
  CHECK(nonzero[0] == std::pair<int, Rational>{0, Rational(1)});
  CHECK(nonzero[1] == std::pair<int, Rational>{1, Rational(1)});
  CHECK(nonzero[2] == std::pair<int, Rational>{0, Rational(-1)});
  CHECK(nonzero[3] == std::pair<int, Rational>{1, Rational(-1)});
  for (size_t i = 0; i < 3; ++i) CHECK(word.product[i] == target[i]);
  CHECK(word.residual_inf == 0.0);
}

TEST_CASE("horizontal targets need a single letter") {
  auto word = h1_scheme().decompose(VecD{0.0, -1.75, 0.0});
  int nonzero = 0;
  for (const auto& letter : word.letters)
    if (std::fabs(letter.amplitude) > 0) {
      ++nonzero;
      CHECK(letter.direction == 1);
      CHECK(letter.amplitude == doctest::Approx(-1.75));
    }
  CHECK(nonzero == 1);
}

TEST_CASE("zero decomposes to all-zero amplitudes") {
  auto word = h1_scheme().decompose(VecD{0, 0, 0});
  for (const auto& letter : word.letters) CHECK(letter.amplitude == 0.0);
}

TEST_CASE("reconstruction over random targets in every catalog group") {
  for (const char* name : {"heisenberg(1)", "heisenberg(2)", "engel", "free_nilpotent(2,3)"}) {
    auto g = make_calibrated_group(name, 8000, 0x700 + name[0]);
    auto scheme = DecompositionScheme::build(g);
    Rng rng(0x600d + static_cast<uint64_t>(name[0]));
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
      VecD xi(static_cast<size_t>(g->dim()));
      for (auto& v : xi) v = rng.uniform(-1.0, 1.0);
      auto word = scheme.decompose(xi);
      worst = std::max(worst, word.residual_inf);
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("letters realize a horizontal polygonal path") {
  // the word is a concatenation of horizontal segments, so its polygonal
  // control lifts to a horizontal curve reaching the same endpoint
  auto g = h1();
  VecD target{0.3, -0.4, 0.7};
  auto word = h1_scheme().decompose(target);
  // successive legs multiply on the right, so the path follows product order
  std::vector<VecQ> legs;
  for (const auto& letter : word.letters) {
    VecQ v(static_cast<size_t>(g->horizontal_dim()), Rational(0));
    v[static_cast<size_t>(letter.direction)] = Rational::snap(letter.amplitude, 40);
    legs.push_back(std::move(v));
  }
  Curve c = lift(g, g->identity<Rational>(), HorizontalControl::polygon(legs, Rational(1)), 65);
  auto report = is_horizontal(c, 1e-10);
  CHECK(report.pass);
  VecD end = to_double_vec(c.eval_exact(Rational(static_cast<long long>(legs.size()))));
  for (int i = 0; i < 3; ++i)
    CHECK(end[static_cast<size_t>(i)] == doctest::Approx(target[static_cast<size_t>(i)]).epsilon(1e-6));
}

TEST_CASE("scaling consistency on the heisenberg closed form") {
  // amplitudes of delta_t(xi) are t times the amplitudes of xi: generator
  // letters scale linearly, the rectangle's two amplitudes scale by t
  // because its output scales by t^2
  VecD xi{0.5, -0.25, 0.8};
  auto base = h1_scheme().decompose(xi);
  for (double t : {0.5, 2.0, 3.0}) {
    auto scaled = h1_scheme().decompose(h1()->dilate(t, xi));
    REQUIRE(scaled.letters.size() == base.letters.size());
    for (size_t i = 0; i < base.letters.size(); ++i) {
      CHECK(scaled.letters[i].direction == base.letters[i].direction);
      CHECK(scaled.letters[i].amplitude ==
            doctest::Approx(t * base.letters[i].amplitude).epsilon(1e-9));
    }
  }
}

TEST_CASE("constants: k0 fixed, C0 finite and seed stable, monotone in samples") {
  auto constants_a = h1_scheme().estimate_constants(2000, 1);
  auto constants_b = h1_scheme().estimate_constants(2000, 2);
  CHECK(constants_a.k0 == 6);
  CHECK(constants_a.c0 >= 1.0);
  double ratio = constants_a.c0 > constants_b.c0 ? constants_a.c0 / constants_b.c0
                                                 : constants_b.c0 / constants_a.c0;
  CHECK(ratio < 1.1);

  // doubling the samples never decreases the max-based estimate
  auto small = h1_scheme().estimate_constants(1000, 3);
  auto large = h1_scheme().estimate_constants(2000, 3);
  CHECK(large.c0 >= small.c0);
}

TEST_CASE("exact mode refuses irrational roots") {
  VecQ target{Rational(0), Rational(0), Rational(2)};  // sqrt(2) amplitude needed
  CHECK_THROWS_AS(h1_scheme().decompose_exact(target), DecompositionError);
  VecQ nice{Rational(0), Rational(0), Rational(9, 4)};
  auto word = h1_scheme().decompose_exact(nice);
  CHECK(word.product[2] == Rational(9, 4));
}

TEST_CASE("snapped decomposition returns an exact nearby product") {
  Rng rng(0xabcd);
  for (int it = 0; it < 20; ++it) {
    VecD xi(3);
    for (auto& v : xi) v = rng.uniform(-1.0, 1.0);
    auto word = h1_scheme().decompose_snapped(xi, 20);
    CHECK(word.residual_inf < 1e-4);
    // the product really is the exact fold of the snapped letters
    auto refold = word_product(*h1(), word.letters);
    for (size_t i = 0; i < 3; ++i) CHECK(refold[i] == word.product[i]);
  }
}

TEST_CASE("engel factorization clears the depth-3 coordinate") {
  auto g = make_calibrated_group("engel", 8000, 0xe9e1);
  auto scheme = DecompositionScheme::build(g);
  auto word = scheme.decompose(VecD{0, 0, 0, 1});
  CHECK(word.residual_inf <= 1e-12);
  // the block realizes e4 through a bracket of depth 3, so letters carry
  // |1|^{1/3}-sized amplitudes
  double max_amp = 0.0;
  for (const auto& letter : word.letters) max_amp = std::max(max_amp, std::fabs(letter.amplitude));
  CHECK(max_amp == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sup of |xi| over the unit sphere") {
  double sup = sup_euclidean_on_unit_sphere(*h1(), 2000, 0x5d);
  CHECK(sup >= 1.0);
  CHECK(sup <= std::sqrt(3.0) + 1e-9);
}

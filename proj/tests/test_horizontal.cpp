#include "doctest.h"

#include <cmath>

#include "carnot/horizontal.hpp"

using namespace carnot;

namespace {

std::shared_ptr<CarnotGroup> h1() {
  static auto g = make_calibrated_group("heisenberg(1)", 20000, 0xbead);
  return g;
}

Poly1Q poly(std::initializer_list<long long> coeffs) {
  std::vector<Rational> c;
  for (long long v : coeffs) c.push_back(Rational(v));
  return Poly1Q(std::move(c));
}

// h = (1, 2t) from the origin: gamma(t) = (t, t^2, t^3/6)
Curve cubic_curve() {
  auto control = HorizontalControl::single({poly({1}), poly({0, 2})}, Rational(1));
  return lift(h1(), h1()->identity<Rational>(), control, 129);
}

}  // namespace

TEST_CASE("horizontal frame fields on heisenberg") {
  auto g = h1();
  VecD x{0.4, -1.2, 7.0};
  VecD x1 = horizontal_field(*g, 0, x);
  VecD x2 = horizontal_field(*g, 1, x);
  CHECK(x1[0] == doctest::Approx(1.0));
  CHECK(x1[1] == doctest::Approx(0.0));
  CHECK(x1[2] == doctest::Approx(0.6));  // -x2/2
  CHECK(x2[0] == doctest::Approx(0.0));
  CHECK(x2[1] == doctest::Approx(1.0));
  CHECK(x2[2] == doctest::Approx(0.2));  // x1/2

  // X_j(0) = e_j on every catalog group
  for (const char* name : {"heisenberg(2)", "engel", "free_nilpotent(2,3)"}) {
    auto gg = make_group(name);
    for (int j = 0; j < gg->horizontal_dim(); ++j) {
      VecD at0 = horizontal_field(*gg, j, gg->identity<double>());
      for (int i = 0; i < gg->dim(); ++i)
        CHECK(at0[static_cast<size_t>(i)] == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
  CHECK_THROWS_AS(horizontal_field(*g, 2, x), std::out_of_range);
}

TEST_CASE("abelian frame is constant") {
  auto g = make_group(abelian_algebra(3));
  VecD x{3, -1, 4};
  for (int j = 0; j < 3; ++j) {
    VecD xj = horizontal_field(*g, j, x);
    for (int i = 0; i < 3; ++i)
      CHECK(xj[static_cast<size_t>(i)] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("straight-line control lifts to a straight line") {
  auto control = HorizontalControl::single({poly({1}), poly({0})}, Rational(1));
  Curve c = lift(h1(), h1()->identity<Rational>(), control, 65);
  VecQ end = c.eval_exact(Rational(1));
  CHECK(end[0] == Rational(1));
  CHECK(end[1].is_zero());
  CHECK(end[2].is_zero());
}

TEST_CASE("h = (1, 2t) lifts to (t, t^2, t^3/6) exactly") {
  Curve c = cubic_curve();
  for (const auto& t : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
    VecQ p = c.eval_exact(t);
    CHECK(p[0] == t);
    CHECK(p[1] == t * t);
    CHECK(p[2] == t * t * t * Rational(1, 6));
  }
}

TEST_CASE("unit square of controls closes onto the vertical axis") {
  VecQ right{Rational(1), Rational(0)}, up{Rational(0), Rational(1)};
  VecQ left{Rational(-1), Rational(0)}, down{Rational(0), Rational(-1)};
  auto control = HorizontalControl::polygon({right, up, left, down}, Rational(1));
  Curve c = lift(h1(), h1()->identity<Rational>(), control, 65);
  VecQ end = c.eval_exact(Rational(4));
  CHECK(end[0].is_zero());
  CHECK(end[1].is_zero());
  CHECK(end[2] == Rational(1));
}

TEST_CASE("lifted curves satisfy the horizontality ODE symbolically") {
  for (const char* name : {"heisenberg(1)", "engel", "free_nilpotent(2,3)"}) {
    auto g = make_group(name);
    auto control = HorizontalControl::single({poly({1, -2}), poly({0, 2, 3})}, Rational(1));
    Curve c = lift(g, g->identity<Rational>(), control, 33);
    auto report = is_horizontal(c, 1e-8);
    CHECK(report.symbolic);
    CHECK(report.pass);
    CHECK(report.max_residual == 0.0);
  }
}

TEST_CASE("non-horizontal curves are rejected") {
  // (t, 0, t): gamma_3' = 1 but the frame demands 0
  PiecewisePolyQ path;
  path.breaks = {Rational(0), Rational(1)};
  path.segments.push_back({poly({0, 1}), poly({0}), poly({0, 1})});
  Curve c;
  c.group = h1();
  c.exact = path;
  auto report = is_horizontal(c, 1e-8);
  CHECK(report.symbolic);
  CHECK_FALSE(report.pass);
  CHECK(report.max_residual == doctest::Approx(1.0));
}

TEST_CASE("constant curves are horizontal; sampled checks work") {
  Curve c;
  c.group = h1();
  for (int k = 0; k <= 10; ++k) {
    c.times.push_back(0.1 * k);
    c.points.push_back(VecD{0.3, 0.4, -0.2});
  }
  auto report = is_horizontal(c, 1e-8);
  CHECK_FALSE(report.symbolic);
  CHECK(report.pass);

  Curve tiny;
  tiny.group = h1();
  tiny.times = {0.0, 1.0};
  tiny.points = {VecD{0, 0, 0}, VecD{1, 0, 0}};
  CHECK_THROWS_AS(is_horizontal(tiny, 1e-8), std::invalid_argument);
}

TEST_CASE("left invariance of lifting") {
  auto g = h1();
  auto control = HorizontalControl::single({poly({1, 1}), poly({0, 2})}, Rational(1));
  VecQ a{Rational(1, 2), Rational(-1, 3), Rational(2)};
  Curve from_zero = lift(g, g->identity<Rational>(), control, 17);
  Curve from_a = lift(g, a, control, 17);
  for (const auto& t : {Rational(1, 3), Rational(2, 3), Rational(1)}) {
    VecQ translated = g->multiply(a, from_zero.eval_exact(t));
    VecQ direct = from_a.eval_exact(t);
    for (size_t i = 0; i < translated.size(); ++i) CHECK(translated[i] == direct[i]);
  }
}

TEST_CASE("dilation covariance of lifting on the closed-form example") {
  auto g = h1();
  Rational lambda(3, 2);
  Curve gamma = cubic_curve();

  // delta_lambda(gamma(t)) equals the lift of the scaled control lambda h
  auto scaled = HorizontalControl::single({poly({1}).scaled(lambda), poly({0, 2}).scaled(lambda)},
                                          Rational(1));
  Curve lifted_scaled = lift(g, g->identity<Rational>(), scaled, 17);
  for (const auto& t : {Rational(1, 4), Rational(3, 4)}) {
    VecQ lhs = g->dilate(lambda, gamma.eval_exact(t));
    VecQ rhs = lifted_scaled.eval_exact(t);
    for (size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == rhs[i]);
  }

  // reparametrization: the lift of lambda h(lambda u) at u = t/lambda is gamma(t)
  // h(lambda u) = (1, 2 lambda u)
  auto reparam = HorizontalControl::single(
      {poly({1}).scaled(lambda), Poly1Q(std::vector<Rational>{Rational(0), lambda * lambda * Rational(2)})},
      Rational(1));
  Curve lifted_reparam = lift(g, g->identity<Rational>(), reparam, 17);
  for (const auto& t : {Rational(1, 2), Rational(3, 4)}) {
    VecQ lhs = lifted_reparam.eval_exact(t / lambda);
    VecQ rhs = gamma.eval_exact(t);
    for (size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == rhs[i]);
  }
}

TEST_CASE("horizontal rays") {
  auto g = h1();
  // from the origin the ray is a straight horizontal line
  VecD ray0 = horizontal_ray(*g, VecD{0, 0, 0}, VecD{2, -1}, 0.5);
  CHECK(ray0[0] == doctest::Approx(1.0));
  CHECK(ray0[1] == doctest::Approx(-0.5));
  CHECK(ray0[2] == doctest::Approx(0.0));

  // from (0,0,1) in direction e1 the vertical coordinate is preserved
  VecD ray1 = horizontal_ray(*g, VecD{0, 0, 1}, VecD{1, 0}, 0.7);
  CHECK(ray1[0] == doctest::Approx(0.7));
  CHECK(ray1[1] == doctest::Approx(0.0));
  CHECK(ray1[2] == doctest::Approx(1.0));

  // t = 0 gives the base point back
  VecD ray2 = horizontal_ray(*g, VecD{0.1, 0.2, 0.3}, VecD{5, 5}, 0.0);
  CHECK(ray2[0] == doctest::Approx(0.1));
  CHECK(ray2[2] == doctest::Approx(0.3));
}

TEST_CASE("ray error of the cubic curve decays at rate 3/2") {
  Curve c = cubic_curve();
  std::vector<double> grid;
  for (int k = 0; k < 25; ++k) grid.push_back(1e-4 * std::pow(10.0, 3.0 * k / 24.0));
  auto study = ray_error_study(c, grid);
  CHECK_FALSE(study.degenerate);
  CHECK(study.slope == doctest::Approx(1.5).epsilon(0.034));  // 1 + 1/s with s = 2

  // closed form: L^{-1} gamma = (0, t^2, -t^3/3)
  auto g = h1();
  double mu2 = g->norm().mu[1], mu3 = g->norm().mu[2];
  for (size_t k = 0; k < grid.size(); ++k) {
    double t = grid[k];
    double expect = std::max(mu2 * t * t, mu3 * std::sqrt(t * t * t / 3.0));
    CHECK(study.error[k] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("straight lines coincide with their rays") {
  auto control = HorizontalControl::single({poly({2}), poly({-1})}, Rational(1));
  Curve c = lift(h1(), h1()->identity<Rational>(), control, 17);
  auto study = ray_error_study(c, {1e-3, 1e-2, 1e-1, 0.5});
  CHECK(study.degenerate);
  for (double e : study.error) CHECK(e <= 1e-14);
}

TEST_CASE("polynomial curves obey the ray bound with a stable constant") {
  for (const char* name : {"heisenberg(1)", "heisenberg(2)", "engel", "free_nilpotent(2,3)"}) {
    auto g = make_calibrated_group(name, 8000, 0x10ca1);
    std::vector<Poly1Q> comps;
    comps.push_back(poly({1, -1}));
    comps.push_back(poly({0, 2, 1}));
    for (int j = 2; j < g->horizontal_dim(); ++j) comps.push_back(poly({1}));
    Curve c = lift(g, g->identity<Rational>(), HorizontalControl::single(std::move(comps), Rational(1)), 17);

    std::vector<double> coarse, fine;
    for (int k = 0; k < 12; ++k) coarse.push_back(1e-4 * std::pow(10.0, 3.0 * k / 11.0));
    for (int k = 0; k < 48; ++k) fine.push_back(1e-4 * std::pow(10.0, 3.0 * k / 47.0));
    auto a = ray_error_study(c, coarse);
    auto b = ray_error_study(c, fine);
    CHECK(std::isfinite(a.c_hat));
    CHECK(a.c_hat > 0.0);
    CHECK(b.c_hat / a.c_hat < 2.0);  // grid-stable constant
    CHECK(b.slope >= 1.0 + 1.0 / g->step() - 0.05);
  }
}

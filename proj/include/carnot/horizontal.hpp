#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

/// Vector-valued piecewise polynomial on [0, T] with rational breakpoints;
/// each segment's polynomials run in local time (t - break[k]).
struct PiecewisePolyQ {
  std::vector<Rational> breaks;                 // size segments + 1, increasing, starts at 0
  std::vector<std::vector<Poly1Q>> segments;    // [segment][component]

  int components() const;
  Rational horizon() const { return breaks.back(); }
  int segment_index(const Rational& t) const;
  VecQ eval(const Rational& t) const;
  VecD eval(double t) const;
  PiecewisePolyQ derivative() const;
};

/// Horizontal control: t -> (h_1(t), ..., h_n(t)), the horizontal
/// velocities to integrate. Piecewise-polynomial segments, so lifting is
/// exact.
struct HorizontalControl {
  PiecewisePolyQ h;

  static HorizontalControl single(std::vector<Poly1Q> components, Rational horizon);
  /// Concatenation of constant-velocity legs, each of the given duration.
  static HorizontalControl polygon(const std::vector<VecQ>& velocities, Rational leg_duration);
};

/// An absolutely continuous curve: exact piecewise-polynomial coordinates
/// when it came from lift() (or was constructed symbolically), plus a
/// sample grid for numeric consumers.
struct Curve {
  std::shared_ptr<const CarnotGroup> group;
  std::optional<PiecewisePolyQ> exact;
  std::vector<double> times;
  std::vector<VecD> points;

  VecD eval(double t) const;
  VecQ eval_exact(const Rational& t) const;
  double horizon() const;
};

/// Left-invariant horizontal frame field X_j(x) = e_j + dQ/dy_j(x, 0).
VecD horizontal_field(const CarnotGroup& group, int j, const VecD& x);
VecQ horizontal_field(const CarnotGroup& group, int j, const VecQ& x);

/// Integrates the horizontal ODE gamma' = sum_j h_j X_j(gamma) from x0.
/// The system is triangular in the layer order: horizontal coordinates
/// integrate directly, each higher coordinate's velocity is a polynomial
/// in already-known lower-degree coordinates, so every layer is pure
/// quadrature and the result is exact.
Curve lift(std::shared_ptr<const CarnotGroup> group, const VecQ& x0, const HorizontalControl& control,
           int sample_count = 257);

struct HorizontalityReport {
  bool pass = false;
  bool symbolic = false;      // residual checked as a polynomial identity
  double max_residual = 0.0;  // max |gamma' - sum_j gamma_j' X_j(gamma)| over checked times
  long checked = 0;
};

/// Symbolic residual for curves with exact form; central differences on
/// the sample grid otherwise (needs >= 3 samples).
HorizontalityReport is_horizontal(const Curve& curve, double tol);

/// L(t) = f0 * (t v, 0, ..., 0): the group-translated straight horizontal
/// line with initial velocity v.
VecD horizontal_ray(const CarnotGroup& group, const VecD& f0, const VecD& v, double t);
VecQ horizontal_ray(const CarnotGroup& group, const VecQ& f0, const VecQ& v, const Rational& t);

struct RayErrorStudy {
  std::vector<double> t;
  std::vector<double> error;   // d(gamma(t), L_gamma(t))
  double slope = 0.0;          // log-log least squares fit
  double c_hat = 0.0;          // max error / t^{1 + 1/s}
  bool degenerate = false;     // error identically ~0 (curve equals its ray)
};

/// Measures how fast the curve separates from its horizontal ray. The
/// expected rate for Lipschitz-derivative horizontal curves is t^{1+1/s}.
RayErrorStudy ray_error_study(const Curve& curve, const std::vector<double>& t_grid);

}  // namespace carnot

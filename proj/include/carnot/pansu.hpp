#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carnot/decomposition.hpp"
#include "carnot/horizontal.hpp"

namespace carnot {

class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct HorizontalityCertificate {
  enum class Kind { Analytic, Sampled } kind = Kind::Analytic;
  double max_residual = 0.0;
  int curves = 0;
  uint64_t seed = 0;
};

/// A polynomial map between Carnot groups carrying its symbolic Jacobian
/// and a horizontality-preservation certificate. Components are exact
/// polynomials in the source coordinates, so evaluation works in both
/// double and exact rational mode.
class CarnotMap {
public:
  std::shared_ptr<const CarnotGroup> source, target;
  std::string description;
  std::vector<SparsePoly> components;           // target_dim polys in source_dim vars
  std::vector<std::vector<SparsePoly>> jacobian;  // [i][l] = d f_i / d x_l
  HorizontalityCertificate certificate;

  static CarnotMap from_components(std::shared_ptr<const CarnotGroup> source,
                                   std::shared_ptr<const CarnotGroup> target,
                                   std::vector<SparsePoly> components, std::string description,
                                   HorizontalityCertificate certificate);

  template <class S>
  std::vector<S> operator()(const std::vector<S>& x) const {
    std::vector<S> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.eval(x));
    return out;
  }

  template <class S>
  std::vector<S> gradient(int i, const std::vector<S>& x) const {
    std::vector<S> out;
    out.reserve(jacobian[static_cast<size_t>(i)].size());
    for (const auto& d : jacobian[static_cast<size_t>(i)]) out.push_back(d.eval(x));
    return out;
  }
};

CarnotMap identity_map(std::shared_ptr<const CarnotGroup> group);
CarnotMap left_translation(std::shared_ptr<const CarnotGroup> group, const VecQ& a);
CarnotMap dilation_map(std::shared_ptr<const CarnotGroup> group, const Rational& r);
/// Extends a generator matrix to the whole algebra through brackets;
/// throws std::invalid_argument when the matrix does not define a Lie
/// algebra morphism (checked exactly on the structure constants).
CarnotMap graded_homomorphism(std::shared_ptr<const CarnotGroup> source,
                              std::shared_ptr<const CarnotGroup> target,
                              const std::vector<std::vector<Rational>>& generator_matrix);
/// f(x) = (x1, x2 + psi(x1), x3 + (1/2) int_0^{x1} (s psi'(s) - psi(s)) ds)
/// on the first Heisenberg group; preserves horizontal curves for any
/// polynomial psi.
CarnotMap heisenberg_shear(std::shared_ptr<const CarnotGroup> h1, const Poly1Q& psi);
CarnotMap compose_maps(const CarnotMap& outer, const CarnotMap& inner);

/// Lifts random polynomial controls, pushes the exact image curves
/// through the map, and reports the worst symbolic-then-numeric
/// horizontality residual.
HorizontalityCertificate sample_horizontality_certificate(const CarnotMap& f, int curves,
                                                          uint64_t seed);

// ---------------------------------------------------------------------------
// Pansu difference quotients and derivatives
// ---------------------------------------------------------------------------

/// R(x, xi; t) = delta_{1/t}( f(x)^{-1} f(x delta_t(xi)) ), t > 0.
VecD difference_quotient(const CarnotMap& f, const VecD& x, const VecD& xi, double t,
                         const std::optional<Box>& omega = std::nullopt);
VecQ difference_quotient(const CarnotMap& f, const VecQ& x, const VecQ& xi, const Rational& t,
                         const std::optional<Box>& omega = std::nullopt);

/// D_{(j, lambda)} f(x) = lambda (grad f_1 . X_j, ..., grad f_nhat . X_j, 0...).
/// Throws DomainError when x leaves the declared domain.
template <class S>
std::vector<S> horizontal_derivative(const CarnotMap& f, const std::vector<S>& x,
                                     const BasicWordLetter<S>& letter,
                                     const std::optional<Box>& omega = std::nullopt);

/// z(x, xi) = D_{xi_k0} f(x) ... D_{xi_1} f(x) for a factored word.
template <class S>
std::vector<S> pansu_derivative_word(const CarnotMap& f, const std::vector<S>& x,
                                     const BasicWord<S>& word);

/// Decomposes xi through the scheme, then multiplies the horizontal
/// derivatives.
VecD pansu_derivative(const CarnotMap& f, const VecD& x, const VecD& xi,
                      const DecompositionScheme& scheme);

/// Intermediate points x_k(t) = x_{k+1} delta_t(xi_{k+1}), x_{k0} = x;
/// returned as [x_{k0}, ..., x_1]. Throws DomainError when a point leaves
/// omega.
template <class S, class T>
std::vector<std::vector<S>> pansu_trick_points(const CarnotGroup& source, const std::vector<S>& x,
                                               const BasicWord<S>& word, const T& t,
                                               const std::optional<Box>& omega = std::nullopt);

/// Residual of the difference-quotient factorization
/// R(x, xi;t) = R(x_{k0}, xi_{k0};t) ... R(x_1(t), xi_1;t)
/// with xi the exact product of the word. An algebraic identity;
/// evaluated in exact arithmetic the residual is pure roundoff of the
/// final distance.
double pansu_trick_residual(const CarnotMap& f, const VecQ& x, const HorizontalWordQ& word,
                            const Rational& t, const std::optional<Box>& omega = std::nullopt);

/// z_0(x, xi; t): the horizontal derivatives taken at the trick points
/// instead of x, multiplied in word order.
VecQ trick_point_derivative(const CarnotMap& f, const VecQ& x, const HorizontalWordQ& word,
                            const Rational& t, const std::optional<Box>& omega = std::nullopt);

// ---------------------------------------------------------------------------
// Moduli of continuity and experiment regions
// ---------------------------------------------------------------------------

/// Concave, nondecreasing, piecewise-linear majorant with omega(0) = 0.
struct ModulusOfContinuity {
  std::vector<double> knots;   // increasing, knots[0] == 0
  std::vector<double> values;  // values[0] == 0
  bool degenerate = false;     // constant gradients; omega = 1e-15 t placeholder

  double eval(double t) const;
  double max_knot() const { return knots.empty() ? 0.0 : knots.back(); }
  /// Concavity + monotonicity + omega(Ct) <= C omega(t) spot checks.
  bool invariants_hold(std::string* why = nullptr) const;
};

/// Least concave nondecreasing majorant of sampled gradient oscillation
/// against metric distance over the enlarged region.
struct ExperimentRegion;
ModulusOfContinuity estimate_modulus(const CarnotMap& f, const ExperimentRegion& region,
                                     long samples, uint64_t seed);

/// Compact box A inside omega with the safe Pansu horizon
/// t_A = dist(A, complement of omega) / (2 k0 C0 sup_{|xi|=1} |xi|_2).
struct ExperimentRegion {
  Box a_box;
  std::optional<Box> omega;     // absent = whole group (t_A capped)
  double boundary_distance = 0.0;
  double enlarged_radius = 0.0;  // half the boundary distance
  int k0 = 0;
  double c0 = 0.0;
  double sup_xi = 0.0;
  double t_horizon = 0.0;  // t_A (after the cap)
  double t_cap = 0.0;

  bool in_omega(const VecD& p) const { return !omega || omega->contains(p); }
};

ExperimentRegion make_region(const DecompositionScheme& scheme, const Box& a_box,
                             const std::optional<Box>& omega, double t_cap, long samples,
                             uint64_t seed);

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

std::vector<Rational> make_t_grid(double t_max, int points, double decades, int snap_bits = 24);
/// Fixed directions on the unit sphere: all +-e_j, the normalized
/// higher-layer basis directions, then seeded sphere samples; each is
/// returned as an exact snapped word.
std::vector<HorizontalWordQ> make_xi_words(const DecompositionScheme& scheme, int count,
                                           uint64_t seed, int snap_bits = 20);
std::vector<VecQ> make_x_set(const ExperimentRegion& region, int count, uint64_t seed,
                             int snap_bits = 12);

struct RatePoint {
  double t = 0.0;
  double error = 0.0;  // d(R(x, xi; t), z(x, xi))
  double bound = 0.0;  // omega(t)^{1/s^{k0}}
};

struct RateSample {
  VecD x, xi;
  std::vector<RatePoint> points;  // ascending t
  double slope = 0.0;
  double c_hat = 0.0;  // max error / bound
};

struct RateStudy {
  std::vector<double> t_grid;      // ascending
  std::vector<RateSample> samples;
  std::vector<double> max_error;   // per t, over samples
  double c_hat = 0.0;
  double slope_of_max = 0.0;
  double ratio_small_over_large = 0.0;  // max error at t_min / max error at t_max
  bool decayed = false;
  double bound_exponent = 0.0;  // 1/s^{k0}
};

/// Exact-mode convergence-rate verification of the difference quotients
/// against the explicit Pansu derivative.
RateStudy run_rate_study(const CarnotMap& f, const ExperimentRegion& region,
                         const ModulusOfContinuity& omega,
                         const std::vector<HorizontalWordQ>& xi_words,
                         const std::vector<VecQ>& x_set, const std::vector<Rational>& t_grid);

struct TrickStudy {
  std::vector<double> residuals;
  double max_residual = 0.0;
  long samples = 0;
  uint64_t seed = 0;
};

TrickStudy run_trick_study(const CarnotMap& f, const ExperimentRegion& region,
                           const DecompositionScheme& scheme, long samples, uint64_t seed);

struct BridgePoint {
  double t = 0.0;
  double d_z = 0.0;  // d(z, z0(t))
  double d_r = 0.0;  // d(R(t), z0(t))
};

struct BridgeStudy {
  std::vector<double> t_grid;
  std::vector<double> max_d_z, max_d_r;  // per t over samples
  double c_hat_z = 0.0, c_hat_r = 0.0;
  double ratio_z = 0.0, ratio_r = 0.0;
  bool decayed_z = false, decayed_r = false;
  double bound_exponent = 0.0;
};

/// Proof-step verification: both gaps z <-> z0 and R <-> z0 must decay at
/// the omega(t)^{1/s^{k0}} rate with stable fitted constants.
BridgeStudy run_bridge_study(const CarnotMap& f, const ExperimentRegion& region,
                             const ModulusOfContinuity& omega,
                             const std::vector<HorizontalWordQ>& xi_words,
                             const std::vector<VecQ>& x_set, const std::vector<Rational>& t_grid);

struct ContinuityStudy {
  std::vector<double> scales;   // displacement distances, descending
  std::vector<double> modulus;  // max over pairs and xi of d(z(x,.), z(x',.))
  double ratio_smallest_over_largest = 0.0;
};

/// Sampled modulus of x -> z(x, .) (continuous Pansu differentiability).
ContinuityStudy run_continuity_study(const CarnotMap& f, const ExperimentRegion& region,
                                     const DecompositionScheme& scheme, int xi_count,
                                     int pairs_per_scale, const std::vector<double>& scales,
                                     uint64_t seed);

}  // namespace carnot

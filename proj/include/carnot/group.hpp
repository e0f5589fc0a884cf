#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnot/bch.hpp"
#include "carnot/rng.hpp"

namespace carnot {

using VecD = std::vector<double>;
using VecQ = std::vector<Rational>;

VecQ to_exact(const VecD& v);          // exact binary values
VecQ snap_vector(const VecD& v, int significant_bits);
VecD to_double_vec(const VecQ& v);
double inf_norm(const VecD& v);
double euclidean_norm(const VecD& v);

/// Axis-aligned box in coordinates.
struct Box {
  VecD lo, hi;

  bool contains(const VecD& p) const;
  bool degenerate() const;
  VecD sample(Rng& rng) const;
  int dim() const { return static_cast<int>(lo.size()); }
};

/// Calibrated homogeneous norm max_i mu_i |x_i|^{1/d_i}, together with the
/// sampling evidence for its triangle inequality. The certificate is
/// evidence, not proof.
struct NormCertificate {
  uint64_t seed = 0;
  long samples = 0;
  double min_slack = 0.0;  // min over samples of |x| + |y| - |xy|; >= 0 on pass
  std::string method;
};

struct HomogeneousNorm {
  std::vector<double> mu;  // one weight per coordinate; 1 on the horizontal layer
  NormCertificate certificate;
};

class CalibrationError : public std::runtime_error {
public:
  CalibrationError(const std::string& what, double worst_margin)
      : std::runtime_error(what), worst_margin(worst_margin) {}
  double worst_margin;
};

/// A Carnot group in exponential coordinates: the validated algebra, the
/// BCH group law, and (once calibrated) a homogeneous norm. Immutable
/// after construction apart from set_norm; all operations are reentrant.
class CarnotGroup {
public:
  explicit CarnotGroup(std::shared_ptr<const CarnotAlgebra> algebra);

  const CarnotAlgebra& algebra() const { return *algebra_; }
  const GroupLaw& law() const { return law_; }
  const Stratification& strat() const { return algebra_->strat; }
  int dim() const { return algebra_->strat.total_dim; }
  int horizontal_dim() const { return algebra_->strat.horizontal_dim; }
  int step() const { return algebra_->strat.step; }
  const std::string& name() const { return algebra_->name; }

  template <class S>
  std::vector<S> multiply(const std::vector<S>& x, const std::vector<S>& y) const {
    check_dim(x);
    check_dim(y);
    std::vector<S> joined;
    joined.reserve(x.size() * 2);
    joined.insert(joined.end(), x.begin(), x.end());
    joined.insert(joined.end(), y.begin(), y.end());
    std::vector<S> out(x.size());
    for (size_t i = 0; i < x.size(); ++i)
      out[i] = x[i] + y[i] + law_.q[i].eval(joined);
    return out;
  }

  template <class S>
  std::vector<S> inverse(const std::vector<S>& x) const {
    check_dim(x);
    std::vector<S> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    return out;
  }

  template <class S>
  std::vector<S> conjugate(const std::vector<S>& g, const std::vector<S>& x) const {
    return multiply(multiply(g, x), inverse(g));
  }

  /// delta_t with t >= 0 (t < 0 rejected); coordinate i scales by t^{d_i}.
  VecD dilate(double t, const VecD& x) const;
  VecQ dilate(const Rational& t, const VecQ& x) const;

  template <class S>
  std::vector<S> identity() const {
    return std::vector<S>(static_cast<size_t>(dim()), S(0));
  }

  void set_norm(HomogeneousNorm norm) { norm_ = std::move(norm); }
  bool has_norm() const { return norm_.has_value(); }
  const HomogeneousNorm& norm() const;

  double norm_value(const VecD& x) const;
  double norm_value(const VecQ& x) const { return norm_value(to_double_vec(x)); }
  double distance(const VecD& x, const VecD& y) const;
  /// Exact group difference, double only at the final root/max.
  double distance(const VecQ& x, const VecQ& y) const;

  /// Draw a point with norm exactly 1 (box sample pushed to the sphere by
  /// a dilation).
  VecD random_unit_sphere(Rng& rng) const;

private:
  std::shared_ptr<const CarnotAlgebra> algebra_;
  GroupLaw law_;
  std::optional<HomogeneousNorm> norm_;

  template <class S>
  void check_dim(const std::vector<S>& v) const {
    if (static_cast<int>(v.size()) != dim())
      throw std::invalid_argument("group element has wrong dimension for " + name());
  }
};

std::shared_ptr<CarnotGroup> make_group(const std::string& catalog_name);
std::shared_ptr<CarnotGroup> make_group(const CarnotAlgebra& algebra);

/// Layer-by-layer bisection calibration of the homogeneous-norm weights.
/// Each layer is tested against the norm restricted to layers <= m with
/// dilation-split pairs on the unit sphere; the certificate re-verifies
/// the assembled norm on fresh samples. Throws CalibrationError when no
/// passing weight exists within the budget.
HomogeneousNorm calibrate_norm(const CarnotGroup& group, long sample_budget, uint64_t seed);

/// Convenience: catalog group with law computed and norm calibrated.
std::shared_ptr<CarnotGroup> make_calibrated_group(const std::string& catalog_name,
                                                   long sample_budget = 20000,
                                                   uint64_t seed = 20240801);

struct EstimateResult {
  std::string name;
  double value = 0.0;
  long samples = 0;
  uint64_t seed = 0;
};

/// Sampled two-sided Holder comparison constant on a box K:
/// max over pairs of max(|x-y| / d(x,y), d(x,y) / |x-y|^{1/s}).
EstimateResult holder_comparison(const CarnotGroup& group, const Box& k_box, long samples,
                                 uint64_t seed);

/// Sampled right-translation constant: max d(ac, bc) / d(a, b)^{1/s} over
/// |a|, |b|, |c| <= bound.
EstimateResult right_translation_estimate(const CarnotGroup& group, double bound, long samples,
                                          uint64_t seed);

struct WordDistanceResult {
  double max_ratio = 0.0;     // d(words) / alpha^{1/s^{k0-1}}
  double max_distance = 0.0;  // max d(a_k0..a_1, b_k0..b_1) observed
  long samples = 0;
  uint64_t seed = 0;
};

/// Perturbs each letter of random k0-letter words by at most alpha in the
/// metric and measures the product distance.
WordDistanceResult word_distance_estimate(const CarnotGroup& group, int k0, double alpha,
                                          double bound, long samples, uint64_t seed);

/// Least-squares slope of log(y) against log(x); ignores non-positive y.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace carnot

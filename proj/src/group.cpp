#include "carnot/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carnot {

VecQ to_exact(const VecD& v) {
  VecQ out;
  out.reserve(v.size());
  for (double x : v) out.push_back(Rational::from_double_exact(x));
  return out;
}

VecQ snap_vector(const VecD& v, int significant_bits) {
  VecQ out;
  out.reserve(v.size());
  for (double x : v) out.push_back(Rational::snap(x, significant_bits));
  return out;
}

VecD to_double_vec(const VecQ& v) {
  VecD out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

double inf_norm(const VecD& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double euclidean_norm(const VecD& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool Box::contains(const VecD& p) const {
  for (size_t i = 0; i < lo.size(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

bool Box::degenerate() const {
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) return true;
  return false;
}

VecD Box::sample(Rng& rng) const {
  VecD p(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
  return p;
}

CarnotGroup::CarnotGroup(std::shared_ptr<const CarnotAlgebra> algebra)
    : algebra_(std::move(algebra)), law_(compute_group_law(algebra_)) {}

VecD CarnotGroup::dilate(double t, const VecD& x) const {
  check_dim(x);
  if (t < 0.0) throw std::domain_error("dilation parameter must be nonnegative");
  VecD out(x.size());
  const auto& deg = strat().degree;
  for (size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < deg[i]; ++k) p *= t;
    out[i] = p * x[i];
  }
  return out;
}

VecQ CarnotGroup::dilate(const Rational& t, const VecQ& x) const {
  check_dim(x);
  if (t.sign() < 0) throw std::domain_error("dilation parameter must be nonnegative");
  VecQ out(x.size());
  const auto& deg = strat().degree;
  for (size_t i = 0; i < x.size(); ++i) out[i] = t.pow(deg[i]) * x[i];
  return out;
}

const HomogeneousNorm& CarnotGroup::norm() const {
  if (!norm_) throw std::logic_error("group norm not calibrated: " + name());
  return *norm_;
}

namespace {

double root_abs(double v, int d) {
  double a = std::fabs(v);
  switch (d) {
    case 1:
      return a;
    case 2:
      return std::sqrt(a);
    case 3:
      return std::cbrt(a);
    default:
      return std::pow(a, 1.0 / d);
  }
}

}  // namespace

double CarnotGroup::norm_value(const VecD& x) const {
  const auto& mu = norm().mu;
  const auto& deg = strat().degree;
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, mu[i] * root_abs(x[i], deg[i]));
  return m;
}

double CarnotGroup::distance(const VecD& x, const VecD& y) const {
  return norm_value(multiply(inverse(x), y));
}

double CarnotGroup::distance(const VecQ& x, const VecQ& y) const {
  return norm_value(multiply(inverse(x), y));
}

VecD CarnotGroup::random_unit_sphere(Rng& rng) const {
  for (;;) {
    VecD x(static_cast<size_t>(dim()));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    double nx = norm_value(x);
    if (nx < 1e-3) continue;
    return dilate(1.0 / nx, x);
  }
}

std::shared_ptr<CarnotGroup> make_group(const std::string& catalog_name) {
  return std::make_shared<CarnotGroup>(
      std::make_shared<const CarnotAlgebra>(catalog(catalog_name)));
}

std::shared_ptr<CarnotGroup> make_group(const CarnotAlgebra& algebra) {
  return std::make_shared<CarnotGroup>(std::make_shared<const CarnotAlgebra>(algebra));
}

namespace {

// norm restricted to layers <= m, with per-layer weights
double restricted_norm(const CarnotGroup& g, const std::vector<double>& layer_mu, int max_layer,
                       const VecD& x) {
  const auto& deg = g.strat().degree;
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (deg[i] > max_layer) continue;
    m = std::max(m, layer_mu[static_cast<size_t>(deg[i] - 1)] * root_abs(x[i], deg[i]));
  }
  return m;
}

VecD restricted_sphere_point(const CarnotGroup& g, const std::vector<double>& layer_mu,
                             int max_layer, Rng& rng) {
  const auto& deg = g.strat().degree;
  for (;;) {
    VecD x(static_cast<size_t>(g.dim()), 0.0);
    for (size_t i = 0; i < x.size(); ++i)
      if (deg[i] <= max_layer) x[i] = rng.uniform(-1.0, 1.0);
    double nx = restricted_norm(g, layer_mu, max_layer, x);
    if (nx < 1e-3) continue;
    return g.dilate(1.0 / nx, x);
  }
}

// worst triangle margin (positive = violation) over dilation-split sphere
// pairs, checked against the norm restricted to layers <= m
double worst_margin(const CarnotGroup& g, const std::vector<double>& layer_mu, int max_layer,
                    long samples, Rng& rng) {
  double worst = -1e300;
  for (long it = 0; it < samples; ++it) {
    VecD x = restricted_sphere_point(g, layer_mu, max_layer, rng);
    VecD y = restricted_sphere_point(g, layer_mu, max_layer, rng);
    double split = it % 4 == 0 ? 1.0 : rng.uniform(0.05, 1.95);
    x = g.dilate(split, x);
    y = g.dilate(2.0 - split, y);
    double margin = restricted_norm(g, layer_mu, max_layer, g.multiply(x, y)) - 2.0;
    worst = std::max(worst, margin);
  }
  return worst;
}

}  // namespace

HomogeneousNorm calibrate_norm(const CarnotGroup& group, long sample_budget, uint64_t seed) {
  const int step = group.step();
  std::vector<double> layer_mu(static_cast<size_t>(step), 1.0);
  Rng rng(seed);
  const long probe = std::max<long>(2000, sample_budget / 10);
  constexpr double kTol = 1e-12;

  for (int m = 2; m <= step; ++m) {
    auto passes = [&](double mu_m, long samples) {
      layer_mu[static_cast<size_t>(m - 1)] = mu_m;
      return worst_margin(group, layer_mu, m, samples, rng) <= kTol;
    };
    if (passes(1.0, probe) && passes(1.0, sample_budget)) {
      layer_mu[static_cast<size_t>(m - 1)] = 1.0;
      continue;
    }
    double lo = 1.0;
    int halvings = 0;
    while (!passes(lo, probe)) {
      lo *= 0.5;
      if (++halvings > 40) {
        double margin = worst_margin(group, layer_mu, m, probe, rng);
        throw CalibrationError("norm calibration exhausted for layer " + std::to_string(m),
                               margin);
      }
    }
    double hi = lo * 2.0;
    for (int it = 0; it < 30; ++it) {
      double mid = 0.5 * (lo + hi);
      if (passes(mid, probe))
        lo = mid;
      else
        hi = mid;
    }
    double mu_m = 0.95 * lo;
    int retries = 0;
    while (!passes(mu_m, sample_budget)) {
      mu_m *= 0.75;
      if (++retries > 20) {
        double margin = worst_margin(group, layer_mu, m, probe, rng);
        throw CalibrationError("norm confirmation exhausted for layer " + std::to_string(m),
                               margin);
      }
    }
    layer_mu[static_cast<size_t>(m - 1)] = mu_m;
  }

  HomogeneousNorm norm;
  norm.mu.resize(static_cast<size_t>(group.dim()));
  for (int i = 0; i < group.dim(); ++i)
    norm.mu[static_cast<size_t>(i)] =
        layer_mu[static_cast<size_t>(group.strat().degree[static_cast<size_t>(i)] - 1)];

  // certificate: fresh pass over the assembled norm
  double min_slack = 1e300;
  {
    Rng fresh(seed ^ 0xabcdef1234567890ULL);
    for (long it = 0; it < sample_budget; ++it) {
      VecD x = restricted_sphere_point(group, layer_mu, step, fresh);
      VecD y = restricted_sphere_point(group, layer_mu, step, fresh);
      double split = it % 4 == 0 ? 1.0 : fresh.uniform(0.05, 1.95);
      x = group.dilate(split, x);
      y = group.dilate(2.0 - split, y);
      double slack = 2.0 - restricted_norm(group, layer_mu, step, group.multiply(x, y));
      min_slack = std::min(min_slack, slack);
    }
  }
  norm.certificate = {seed, sample_budget, min_slack,
                      "layer bisection, dilation-split sphere pairs"};
  if (min_slack < -kTol)
    throw CalibrationError("assembled norm failed fresh verification", -min_slack);
  return norm;
}

std::shared_ptr<CarnotGroup> make_calibrated_group(const std::string& catalog_name,
                                                   long sample_budget, uint64_t seed) {
  auto g = make_group(catalog_name);
  g->set_norm(calibrate_norm(*g, sample_budget, seed));
  return g;
}

EstimateResult holder_comparison(const CarnotGroup& group, const Box& k_box, long samples,
                                 uint64_t seed) {
  if (k_box.degenerate()) throw std::invalid_argument("holder_comparison: degenerate box");
  Rng rng(seed);
  double c_hat = 1.0;
  const double inv_s = 1.0 / group.step();
  for (long it = 0; it < samples; ++it) {
    VecD x = k_box.sample(rng), y = k_box.sample(rng);
    VecD diff(x.size());
    for (size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
    double euclid = euclidean_norm(diff);
    if (euclid < 1e-12) continue;
    double d = group.distance(x, y);
    c_hat = std::max({c_hat, euclid / d, d / std::pow(euclid, inv_s)});
  }
  return {"holder_comparison", c_hat, samples, seed};
}

EstimateResult right_translation_estimate(const CarnotGroup& group, double bound, long samples,
                                          uint64_t seed) {
  Rng rng(seed);
  auto ball_point = [&]() {
    for (;;) {
      VecD x(static_cast<size_t>(group.dim()));
      for (auto& v : x) v = rng.uniform(-bound, bound);
      if (euclidean_norm(x) <= bound) return x;
    }
  };
  double worst = 0.0;
  const double inv_s = 1.0 / group.step();
  for (long it = 0; it < samples; ++it) {
    VecD a = ball_point(), b = ball_point(), c = ball_point();
    double dab = group.distance(a, b);
    if (dab < 1e-12) continue;
    double moved = group.distance(group.multiply(a, c), group.multiply(b, c));
    worst = std::max(worst, moved / std::pow(dab, inv_s));
  }
  return {"right_translation", worst, samples, seed};
}

WordDistanceResult word_distance_estimate(const CarnotGroup& group, int k0, double alpha,
                                          double bound, long samples, uint64_t seed) {
  Rng rng(seed);
  const double exponent = 1.0 / std::pow(group.step(), k0 - 1);
  WordDistanceResult result;
  result.samples = samples;
  result.seed = seed;
  for (long it = 0; it < samples; ++it) {
    VecD word_a = group.identity<double>(), word_b = group.identity<double>();
    for (int k = 0; k < k0; ++k) {
      VecD a(static_cast<size_t>(group.dim()));
      for (auto& v : a) v = rng.uniform(-bound, bound);
      VecD w = group.dilate(alpha * rng.uniform(), group.random_unit_sphere(rng));
      VecD b = group.multiply(a, w);  // d(a, b) = |w| <= alpha
      word_a = group.multiply(word_a, a);
      word_b = group.multiply(word_b, b);
    }
    double d = group.distance(word_a, word_b);
    result.max_distance = std::max(result.max_distance, d);
    result.max_ratio = std::max(result.max_ratio, d / std::pow(alpha, exponent));
  }
  return result;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double denom = n * sxx - sx * sx;
  if (std::fabs(denom) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

}  // namespace carnot

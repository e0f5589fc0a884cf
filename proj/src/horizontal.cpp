#include "carnot/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carnot {

int PiecewisePolyQ::components() const {
  return segments.empty() ? 0 : static_cast<int>(segments.front().size());
}

int PiecewisePolyQ::segment_index(const Rational& t) const {
  for (size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (t <= breaks[k + 1]) return static_cast<int>(k);
  }
  return static_cast<int>(segments.size()) - 1;
}

VecQ PiecewisePolyQ::eval(const Rational& t) const {
  int k = segment_index(t);
  Rational local = t - breaks[static_cast<size_t>(k)];
  VecQ out;
  out.reserve(segments[static_cast<size_t>(k)].size());
  for (const auto& p : segments[static_cast<size_t>(k)]) out.push_back(p.eval(local));
  return out;
}

VecD PiecewisePolyQ::eval(double t) const {
  // double-precision mirror for sampling
  size_t k = 0;
  while (k + 2 < breaks.size() && t > breaks[k + 1].to_double()) ++k;
  double local = t - breaks[k].to_double();
  VecD out;
  out.reserve(segments[k].size());
  for (const auto& p : segments[k]) out.push_back(to_double_poly(p).eval(local));
  return out;
}

PiecewisePolyQ PiecewisePolyQ::derivative() const {
  PiecewisePolyQ d;
  d.breaks = breaks;
  d.segments.reserve(segments.size());
  for (const auto& seg : segments) {
    std::vector<Poly1Q> ds;
    ds.reserve(seg.size());
    for (const auto& p : seg) ds.push_back(p.derivative());
    d.segments.push_back(std::move(ds));
  }
  return d;
}

HorizontalControl HorizontalControl::single(std::vector<Poly1Q> components, Rational horizon) {
  if (horizon.sign() <= 0) throw std::invalid_argument("control horizon must be positive");
  HorizontalControl c;
  c.h.breaks = {Rational(0), std::move(horizon)};
  c.h.segments.push_back(std::move(components));
  return c;
}

HorizontalControl HorizontalControl::polygon(const std::vector<VecQ>& velocities,
                                             Rational leg_duration) {
  if (velocities.empty()) throw std::invalid_argument("polygon control needs legs");
  HorizontalControl c;
  c.h.breaks.push_back(Rational(0));
  for (size_t leg = 0; leg < velocities.size(); ++leg) {
    std::vector<Poly1Q> seg;
    seg.reserve(velocities[leg].size());
    for (const auto& v : velocities[leg]) seg.push_back(Poly1Q::constant(v));
    c.h.segments.push_back(std::move(seg));
    c.h.breaks.push_back(c.h.breaks.back() + leg_duration);
  }
  return c;
}

VecD Curve::eval(double t) const {
  if (exact) return exact->eval(t);
  // piecewise-linear interpolation of the sample grid
  if (times.empty()) throw std::logic_error("curve has no data");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  size_t k = static_cast<size_t>(std::distance(times.begin(), it));
  if (k == times.size()) return points.back();
  if (k == 0) return points.front();
  double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  VecD out(points[k].size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - w) * points[k - 1][i] + w * points[k][i];
  return out;
}

VecQ Curve::eval_exact(const Rational& t) const {
  if (!exact) throw std::logic_error("curve has no exact form");
  return exact->eval(t);
}

double Curve::horizon() const {
  if (exact) return exact->horizon().to_double();
  return times.empty() ? 0.0 : times.back();
}

VecD horizontal_field(const CarnotGroup& group, int j, const VecD& x) {
  if (j < 0 || j >= group.horizontal_dim())
    throw std::out_of_range("horizontal_field: direction outside first layer");
  VecD out(static_cast<size_t>(group.dim()), 0.0);
  out[static_cast<size_t>(j)] = 1.0;
  for (int i = 0; i < group.dim(); ++i) {
    const auto& g = group.law().y_gradient_at_zero[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if (!g.is_zero()) out[static_cast<size_t>(i)] += g.eval(x);
  }
  return out;
}

VecQ horizontal_field(const CarnotGroup& group, int j, const VecQ& x) {
  if (j < 0 || j >= group.horizontal_dim())
    throw std::out_of_range("horizontal_field: direction outside first layer");
  VecQ out(static_cast<size_t>(group.dim()), Rational(0));
  out[static_cast<size_t>(j)] = Rational(1);
  for (int i = 0; i < group.dim(); ++i) {
    const auto& g = group.law().y_gradient_at_zero[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if (!g.is_zero()) out[static_cast<size_t>(i)] += g.eval(x);
  }
  return out;
}

Curve lift(std::shared_ptr<const CarnotGroup> group, const VecQ& x0,
           const HorizontalControl& control, int sample_count) {
  const auto& g = *group;
  const int dim = g.dim();
  const int n = g.horizontal_dim();
  if (static_cast<int>(x0.size()) != dim) throw std::invalid_argument("lift: bad start point");
  if (control.h.components() != n) throw std::invalid_argument("lift: control must have n components");

  Curve curve;
  curve.group = group;
  PiecewisePolyQ path;
  path.breaks = control.h.breaks;

  VecQ start = x0;
  for (size_t seg = 0; seg < control.h.segments.size(); ++seg) {
    const auto& h = control.h.segments[seg];
    std::vector<Poly1Q> gamma(static_cast<size_t>(dim));
    for (int j = 0; j < n; ++j) {
      gamma[static_cast<size_t>(j)] = Poly1Q::constant(start[static_cast<size_t>(j)]) +
                                      h[static_cast<size_t>(j)].antiderivative();
    }
    // higher layers in degree order; dQ_i/dy_j(x, 0) only touches degrees
    // below d_i, which are already in gamma
    for (int i = n; i < dim; ++i) {
      Poly1Q rate;
      for (int j = 0; j < n; ++j) {
        const auto& v = g.law().y_gradient_at_zero[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (v.is_zero()) continue;
        rate = rate + h[static_cast<size_t>(j)] * v.eval1(gamma);
      }
      gamma[static_cast<size_t>(i)] =
          Poly1Q::constant(start[static_cast<size_t>(i)]) + rate.antiderivative();
    }
    Rational local_len = control.h.breaks[seg + 1] - control.h.breaks[seg];
    for (int i = 0; i < dim; ++i) start[static_cast<size_t>(i)] = gamma[static_cast<size_t>(i)].eval(local_len);
    path.segments.push_back(std::move(gamma));
  }
  curve.exact = std::move(path);

  double horizon = curve.exact->horizon().to_double();
  curve.times.reserve(static_cast<size_t>(sample_count));
  curve.points.reserve(static_cast<size_t>(sample_count));
  for (int k = 0; k < sample_count; ++k) {
    double t = horizon * k / (sample_count - 1);
    curve.times.push_back(t);
    curve.points.push_back(curve.exact->eval(t));
  }
  return curve;
}

namespace {

HorizontalityReport symbolic_horizontality(const Curve& curve, double tol) {
  const auto& g = *curve.group;
  const int dim = g.dim();
  const int n = g.horizontal_dim();
  HorizontalityReport report;
  report.symbolic = true;
  bool all_zero = true;
  double max_resid = 0.0;
  for (size_t s = 0; s < curve.exact->segments.size(); ++s) {
    const auto& seg = curve.exact->segments[s];
    double span =
        (curve.exact->breaks[s + 1] - curve.exact->breaks[s]).to_double();
    std::vector<Poly1Q> dgamma;
    dgamma.reserve(seg.size());
    for (const auto& p : seg) dgamma.push_back(p.derivative());
    for (int i = n; i < dim; ++i) {
      Poly1Q resid = dgamma[static_cast<size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const auto& v = g.law().y_gradient_at_zero[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (v.is_zero()) continue;
        resid = resid - dgamma[static_cast<size_t>(j)] * v.eval1(seg);
      }
      if (!resid.is_zero()) {
        all_zero = false;
        // numeric magnitude of the residual polynomial on the segment
        Poly1D rd = to_double_poly(resid);
        for (int k = 0; k <= 32; ++k)
          max_resid = std::max(max_resid, std::fabs(rd.eval(span * k / 32.0)));
      }
      report.checked += 33;
    }
  }
  report.max_residual = all_zero ? 0.0 : max_resid;
  report.pass = report.max_residual <= tol;
  return report;
}

}  // namespace

HorizontalityReport is_horizontal(const Curve& curve, double tol) {
  if (curve.exact) return symbolic_horizontality(curve, tol);
  if (curve.times.size() < 3)
    throw std::invalid_argument("is_horizontal: need at least 3 samples");
  const auto& g = *curve.group;
  const int dim = g.dim();
  const int n = g.horizontal_dim();
  HorizontalityReport report;
  for (size_t k = 1; k + 1 < curve.times.size(); ++k) {
    double dt = curve.times[k + 1] - curve.times[k - 1];
    VecD vel(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i)
      vel[static_cast<size_t>(i)] =
          (curve.points[k + 1][static_cast<size_t>(i)] - curve.points[k - 1][static_cast<size_t>(i)]) / dt;
    VecD expect(static_cast<size_t>(dim), 0.0);
    for (int j = 0; j < n; ++j) {
      VecD xj = horizontal_field(g, j, curve.points[k]);
      for (int i = 0; i < dim; ++i)
        expect[static_cast<size_t>(i)] += vel[static_cast<size_t>(j)] * xj[static_cast<size_t>(i)];
    }
    for (int i = 0; i < dim; ++i)
      report.max_residual = std::max(
          report.max_residual,
          std::fabs(vel[static_cast<size_t>(i)] - expect[static_cast<size_t>(i)]));
    ++report.checked;
  }
  report.pass = report.max_residual <= tol;
  return report;
}

VecD horizontal_ray(const CarnotGroup& group, const VecD& f0, const VecD& v, double t) {
  VecD step(static_cast<size_t>(group.dim()), 0.0);
  for (int j = 0; j < group.horizontal_dim(); ++j)
    step[static_cast<size_t>(j)] = t * v[static_cast<size_t>(j)];
  return group.multiply(f0, step);
}

VecQ horizontal_ray(const CarnotGroup& group, const VecQ& f0, const VecQ& v, const Rational& t) {
  VecQ step(static_cast<size_t>(group.dim()), Rational(0));
  for (int j = 0; j < group.horizontal_dim(); ++j)
    step[static_cast<size_t>(j)] = t * v[static_cast<size_t>(j)];
  return group.multiply(f0, step);
}

RayErrorStudy ray_error_study(const Curve& curve, const std::vector<double>& t_grid) {
  const auto& g = *curve.group;
  const int n = g.horizontal_dim();
  RayErrorStudy study;
  double horizon = curve.horizon();

  // initial horizontal velocity
  VecD v(static_cast<size_t>(n), 0.0);
  if (curve.exact) {
    const auto& seg0 = curve.exact->segments.front();
    for (int j = 0; j < n; ++j) {
      Poly1Q d = seg0[static_cast<size_t>(j)].derivative();
      v[static_cast<size_t>(j)] = d.eval(Rational(0)).to_double();
    }
  } else {
    if (curve.times.size() < 2) throw std::invalid_argument("ray_error_study: need samples");
    double dt = curve.times[1] - curve.times[0];
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(j)] =
          (curve.points[1][static_cast<size_t>(j)] - curve.points[0][static_cast<size_t>(j)]) / dt;
  }

  VecD f0 = curve.eval(0.0);
  const double rate = 1.0 + 1.0 / g.step();
  for (double t : t_grid) {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12))
      throw std::out_of_range("ray_error_study: t outside curve domain");
    double err = g.distance(curve.eval(t), horizontal_ray(g, f0, v, t));
    study.t.push_back(t);
    study.error.push_back(err);
    if (t > 0.0) study.c_hat = std::max(study.c_hat, err / std::pow(t, rate));
  }
  study.degenerate = *std::max_element(study.error.begin(), study.error.end()) < 1e-14;
  study.slope = study.degenerate ? std::numeric_limits<double>::infinity()
                                 : log_log_slope(study.t, study.error);
  return study;
}

}  // namespace carnot

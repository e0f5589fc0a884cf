#include "carnot/pansu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

namespace carnot {

// ---------------------------------------------------------------------------
// Map construction
// ---------------------------------------------------------------------------

CarnotMap CarnotMap::from_components(std::shared_ptr<const CarnotGroup> source,
                                     std::shared_ptr<const CarnotGroup> target,
                                     std::vector<SparsePoly> components, std::string description,
                                     HorizontalityCertificate certificate) {
  CarnotMap map;
  map.source = std::move(source);
  map.target = std::move(target);
  map.components = std::move(components);
  map.description = std::move(description);
  map.certificate = certificate;
  if (static_cast<int>(map.components.size()) != map.target->dim())
    throw std::invalid_argument("map component count must match target dimension");
  const int src_dim = map.source->dim();
  map.jacobian.reserve(map.components.size());
  for (const auto& c : map.components) {
    if (c.nvars() != src_dim)
      throw std::invalid_argument("map components must be polynomials in the source coordinates");
    std::vector<SparsePoly> row;
    row.reserve(static_cast<size_t>(src_dim));
    for (int l = 0; l < src_dim; ++l) row.push_back(c.derivative(l));
    map.jacobian.push_back(std::move(row));
  }
  return map;
}

CarnotMap identity_map(std::shared_ptr<const CarnotGroup> group) {
  const int dim = group->dim();
  std::vector<SparsePoly> comps;
  comps.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) comps.push_back(SparsePoly::variable(dim, i));
  auto g = group;
  return CarnotMap::from_components(g, g, std::move(comps), "identity",
                                    {HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0});
}

CarnotMap left_translation(std::shared_ptr<const CarnotGroup> group, const VecQ& a) {
  const int dim = group->dim();
  if (static_cast<int>(a.size()) != dim) throw std::invalid_argument("translation point dimension");
  // f(x) = a * x: substitute the x-slot of the law with the constant a
  std::vector<SparsePoly> comps;
  comps.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    SparsePoly fi(dim);
    fi.add_term(Monomial(dim), a[static_cast<size_t>(i)]);
    Monomial xi(dim);
    xi.e[static_cast<size_t>(i)] = 1;
    fi.add_term(xi, Rational(1));
    for (const auto& [m, c] : group->law().q[static_cast<size_t>(i)].terms()) {
      Rational coeff = c;
      Monomial ym(dim);
      for (int v = 0; v < dim; ++v) {
        for (int k = 0; k < m.e[static_cast<size_t>(v)]; ++k) coeff *= a[static_cast<size_t>(v)];
        ym.e[static_cast<size_t>(v)] = m.e[static_cast<size_t>(dim + v)];
      }
      fi.add_term(ym, coeff);
    }
    comps.push_back(std::move(fi));
  }
  auto g = group;
  return CarnotMap::from_components(g, g, std::move(comps), "left_translation",
                                    {HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0});
}

CarnotMap dilation_map(std::shared_ptr<const CarnotGroup> group, const Rational& r) {
  if (r.sign() < 0) throw std::invalid_argument("dilation factor must be nonnegative");
  const int dim = group->dim();
  std::vector<SparsePoly> comps;
  comps.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    SparsePoly fi = SparsePoly::variable(dim, i).scaled(
        r.pow(group->strat().degree[static_cast<size_t>(i)]));
    comps.push_back(std::move(fi));
  }
  auto g = group;
  return CarnotMap::from_components(g, g, std::move(comps), "dilation(" + r.to_string() + ")",
                                    {HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0});
}

CarnotMap graded_homomorphism(std::shared_ptr<const CarnotGroup> source,
                              std::shared_ptr<const CarnotGroup> target,
                              const std::vector<std::vector<Rational>>& generator_matrix) {
  const auto& sstrat = source->strat();
  const auto& tstrat = target->strat();
  const int sdim = sstrat.total_dim, tdim = tstrat.total_dim;
  const int sn = sstrat.horizontal_dim, tn = tstrat.horizontal_dim;
  if (static_cast<int>(generator_matrix.size()) != tn ||
      static_cast<int>(generator_matrix.front().size()) != sn)
    throw std::invalid_argument("generator matrix must be target_n x source_n");

  // images of the source basis, extended layer by layer through brackets
  std::vector<VecQ> image(static_cast<size_t>(sdim), VecQ(static_cast<size_t>(tdim), Rational(0)));
  for (int j = 0; j < sn; ++j)
    for (int i = 0; i < tn; ++i)
      image[static_cast<size_t>(j)][static_cast<size_t>(i)] =
          generator_matrix[static_cast<size_t>(i)][static_cast<size_t>(j)];
  for (int m = 2; m <= sstrat.step; ++m) {
    auto basis = layer_bracket_basis(source->algebra(), m);
    const int start = sstrat.layer_start(m);
    const int size = sstrat.layer_size(m);
    for (int i = start; i < start + size; ++i) {
      VecQ img(static_cast<size_t>(tdim), Rational(0));
      for (size_t r = 0; r < basis.pairs.size(); ++r) {
        Rational beta = basis.inverse[r][static_cast<size_t>(i - start)];
        if (beta.is_zero()) continue;
        auto [j, k] = basis.pairs[r];
        VecQ w = target->algebra().constants.bracket(image[static_cast<size_t>(j)],
                                                     image[static_cast<size_t>(k)]);
        for (int t = 0; t < tdim; ++t) img[static_cast<size_t>(t)] += beta * w[static_cast<size_t>(t)];
      }
      image[static_cast<size_t>(i)] = std::move(img);
    }
  }

  // morphism check on all basis pairs, exact
  for (int a = 0; a < sdim; ++a) {
    for (int b = a + 1; b < sdim; ++b) {
      VecQ lhs(static_cast<size_t>(tdim), Rational(0));
      for (int k = 0; k < sdim; ++k) {
        Rational c = source->algebra().constants.effective(a, b, k);
        if (c.is_zero()) continue;
        for (int t = 0; t < tdim; ++t)
          lhs[static_cast<size_t>(t)] += c * image[static_cast<size_t>(k)][static_cast<size_t>(t)];
      }
      VecQ rhs = target->algebra().constants.bracket(image[static_cast<size_t>(a)],
                                                     image[static_cast<size_t>(b)]);
      for (int t = 0; t < tdim; ++t) {
        if (lhs[static_cast<size_t>(t)] != rhs[static_cast<size_t>(t)])
          throw std::invalid_argument(
              "generator matrix does not extend to a Lie algebra morphism (bracket [" +
              std::to_string(a + 1) + "," + std::to_string(b + 1) + "])");
      }
    }
  }

  // in exponential coordinates an algebra morphism is the linear map itself
  std::vector<SparsePoly> comps;
  comps.reserve(static_cast<size_t>(tdim));
  for (int i = 0; i < tdim; ++i) {
    SparsePoly fi(sdim);
    for (int j = 0; j < sdim; ++j) {
      const Rational& c = image[static_cast<size_t>(j)][static_cast<size_t>(i)];
      if (c.is_zero()) continue;
      Monomial mono(sdim);
      mono.e[static_cast<size_t>(j)] = 1;
      fi.add_term(mono, c);
    }
    comps.push_back(std::move(fi));
  }
  return CarnotMap::from_components(source, target, std::move(comps), "graded_homomorphism",
                                    {HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0});
}

CarnotMap heisenberg_shear(std::shared_ptr<const CarnotGroup> h1, const Poly1Q& psi) {
  if (h1->dim() != 3 || h1->step() != 2)
    throw std::invalid_argument("heisenberg_shear needs the first Heisenberg group");
  // f = (x1, x2 + psi(x1), x3 + (1/2) int_0^{x1} (s psi'(s) - psi(s)) ds)
  Poly1Q s_psi_prime = Poly1Q(std::vector<Rational>{Rational(0), Rational(1)}) * psi.derivative();
  Poly1Q integrand = s_psi_prime - psi;
  Poly1Q correction = integrand.antiderivative().scaled(Rational(1, 2));

  auto univariate_in_x1 = [](const Poly1Q& p) {
    SparsePoly out(3);
    for (size_t k = 0; k < p.c.size(); ++k) {
      Monomial m(3);
      m.e[0] = static_cast<uint8_t>(k);
      out.add_term(m, p.c[k]);
    }
    return out;
  };

  std::vector<SparsePoly> comps;
  comps.push_back(SparsePoly::variable(3, 0));
  comps.push_back(SparsePoly::variable(3, 1) + univariate_in_x1(psi));
  comps.push_back(SparsePoly::variable(3, 2) + univariate_in_x1(correction));
  return CarnotMap::from_components(h1, h1, std::move(comps), "heisenberg_shear",
                                    {HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0});
}

CarnotMap compose_maps(const CarnotMap& outer, const CarnotMap& inner) {
  if (outer.source->dim() != inner.target->dim())
    throw std::invalid_argument("compose_maps: inner target must match outer source");
  std::vector<SparsePoly> comps;
  comps.reserve(outer.components.size());
  for (const auto& c : outer.components) comps.push_back(c.composed(inner.components));
  HorizontalityCertificate cert{HorizontalityCertificate::Kind::Analytic, 0.0, 0, 0};
  if (outer.certificate.kind == HorizontalityCertificate::Kind::Sampled ||
      inner.certificate.kind == HorizontalityCertificate::Kind::Sampled) {
    cert.kind = HorizontalityCertificate::Kind::Sampled;
    cert.max_residual = std::max(outer.certificate.max_residual, inner.certificate.max_residual);
    cert.curves = std::min(outer.certificate.curves, inner.certificate.curves);
  }
  return CarnotMap::from_components(inner.source, outer.target, std::move(comps),
                                    outer.description + " o " + inner.description, cert);
}

HorizontalityCertificate sample_horizontality_certificate(const CarnotMap& f, int curves,
                                                          uint64_t seed) {
  Rng rng(seed);
  const auto& src = *f.source;
  const int n = src.horizontal_dim();
  double worst = 0.0;
  for (int c = 0; c < curves; ++c) {
    // random degree-2 polynomial control and dyadic start point
    std::vector<Poly1Q> comps;
    for (int j = 0; j < n; ++j) {
      std::vector<Rational> coeffs;
      for (int d = 0; d <= 2; ++d) coeffs.push_back(Rational::snap(rng.uniform(-1.0, 1.0), 12));
      comps.push_back(Poly1Q(std::move(coeffs)));
    }
    VecQ x0 = snap_vector(Box{VecD(static_cast<size_t>(src.dim()), -1.0),
                              VecD(static_cast<size_t>(src.dim()), 1.0)}
                              .sample(rng),
                          12);
    Curve curve = lift(f.source, x0, HorizontalControl::single(std::move(comps), Rational(1)), 65);

    // exact image curve through the polynomial map
    Curve image;
    image.group = f.target;
    PiecewisePolyQ path;
    path.breaks = curve.exact->breaks;
    for (const auto& seg : curve.exact->segments) {
      std::vector<Poly1Q> img;
      img.reserve(f.components.size());
      for (const auto& comp : f.components) img.push_back(comp.eval1(seg));
      path.segments.push_back(std::move(img));
    }
    image.exact = std::move(path);
    auto report = is_horizontal(image, 1e-8);
    worst = std::max(worst, report.max_residual);
  }
  return {HorizontalityCertificate::Kind::Sampled, worst, curves, seed};
}

// ---------------------------------------------------------------------------
// Difference quotients and Pansu derivatives
// ---------------------------------------------------------------------------

VecD difference_quotient(const CarnotMap& f, const VecD& x, const VecD& xi, double t,
                         const std::optional<Box>& omega) {
  if (!(t > 0.0)) throw std::invalid_argument("difference quotient needs t > 0");
  const auto& src = *f.source;
  const auto& tgt = *f.target;
  VecD y = src.multiply(x, src.dilate(t, xi));
  if (omega && (!omega->contains(x) || !omega->contains(y)))
    throw DomainError("difference quotient argument left the domain");
  return tgt.dilate(1.0 / t, tgt.multiply(tgt.inverse(f(x)), f(y)));
}

VecQ difference_quotient(const CarnotMap& f, const VecQ& x, const VecQ& xi, const Rational& t,
                         const std::optional<Box>& omega) {
  if (t.sign() <= 0) throw std::invalid_argument("difference quotient needs t > 0");
  const auto& src = *f.source;
  const auto& tgt = *f.target;
  VecQ y = src.multiply(x, src.dilate(t, xi));
  if (omega && (!omega->contains(to_double_vec(x)) || !omega->contains(to_double_vec(y))))
    throw DomainError("difference quotient argument left the domain");
  return tgt.dilate(Rational(1) / t, tgt.multiply(tgt.inverse(f(x)), f(y)));
}

template <class S>
std::vector<S> horizontal_derivative(const CarnotMap& f, const std::vector<S>& x,
                                     const BasicWordLetter<S>& letter,
                                     const std::optional<Box>& omega) {
  if (omega) {
    VecD xd;
    if constexpr (std::is_same_v<S, double>) {
      xd = x;
    } else {
      xd = to_double_vec(x);
    }
    if (!omega->contains(xd)) throw DomainError("horizontal derivative argument left the domain");
  }
  const auto& tgt = *f.target;
  const int tn = tgt.horizontal_dim();
  std::vector<S> xj = horizontal_field(*f.source, letter.direction, x);
  std::vector<S> out(static_cast<size_t>(tgt.dim()), S(0));
  for (int i = 0; i < tn; ++i) {
    std::vector<S> grad = f.gradient(i, x);
    S dot(0);
    for (size_t l = 0; l < grad.size(); ++l) dot = dot + grad[l] * xj[l];
    out[static_cast<size_t>(i)] = letter.amplitude * dot;
  }
  return out;
}

template <class S>
std::vector<S> pansu_derivative_word(const CarnotMap& f, const std::vector<S>& x,
                                     const BasicWord<S>& word) {
  const auto& tgt = *f.target;
  std::vector<S> acc = tgt.identity<S>();
  for (const auto& letter : word.letters)
    acc = tgt.multiply(acc, horizontal_derivative(f, x, letter));
  return acc;
}

VecD pansu_derivative(const CarnotMap& f, const VecD& x, const VecD& xi,
                      const DecompositionScheme& scheme) {
  return pansu_derivative_word(f, x, scheme.decompose(xi));
}

template <class S, class T>
std::vector<std::vector<S>> pansu_trick_points(const CarnotGroup& source, const std::vector<S>& x,
                                               const BasicWord<S>& word, const T& t,
                                               const std::optional<Box>& omega) {
  std::vector<std::vector<S>> points;
  points.reserve(word.letters.size());
  points.push_back(x);  // x_{k0}
  for (size_t i = 1; i < word.letters.size(); ++i) {
    const auto& prev = points.back();
    auto next = source.multiply(prev, source.dilate(t, letter_element(source, word.letters[i - 1])));
    points.push_back(std::move(next));
  }
  if (omega) {
    for (const auto& p : points) {
      VecD pd;
      if constexpr (std::is_same_v<S, double>) {
        pd = p;
      } else {
        pd = to_double_vec(p);
      }
      if (!omega->contains(pd)) throw DomainError("trick point left the domain");
    }
  }
  return points;
}

double pansu_trick_residual(const CarnotMap& f, const VecQ& x, const HorizontalWordQ& word,
                            const Rational& t, const std::optional<Box>& omega) {
  const auto& src = *f.source;
  const auto& tgt = *f.target;
  auto points = pansu_trick_points(src, x, word, t, omega);
  VecQ rhs = tgt.identity<Rational>();
  for (size_t i = 0; i < word.letters.size(); ++i) {
    VecQ xi_k = letter_element(src, word.letters[i]);
    rhs = tgt.multiply(rhs, difference_quotient(f, points[i], xi_k, t, omega));
  }
  VecQ lhs = difference_quotient(f, x, word.product, t, omega);
  return tgt.distance(lhs, rhs);
}

VecQ trick_point_derivative(const CarnotMap& f, const VecQ& x, const HorizontalWordQ& word,
                            const Rational& t, const std::optional<Box>& omega) {
  const auto& tgt = *f.target;
  auto points = pansu_trick_points(*f.source, x, word, t, omega);
  VecQ acc = tgt.identity<Rational>();
  for (size_t i = 0; i < word.letters.size(); ++i)
    acc = tgt.multiply(acc, horizontal_derivative(f, points[i], word.letters[i]));
  return acc;
}

// explicit instantiations
template VecD horizontal_derivative<double>(const CarnotMap&, const VecD&,
                                            const BasicWordLetter<double>&,
                                            const std::optional<Box>&);
template VecQ horizontal_derivative<Rational>(const CarnotMap&, const VecQ&,
                                              const BasicWordLetter<Rational>&,
                                              const std::optional<Box>&);
template VecD pansu_derivative_word<double>(const CarnotMap&, const VecD&,
                                            const BasicWord<double>&);
template VecQ pansu_derivative_word<Rational>(const CarnotMap&, const VecQ&,
                                              const BasicWord<Rational>&);
template std::vector<std::vector<double>> pansu_trick_points<double, double>(
    const CarnotGroup&, const VecD&, const BasicWord<double>&, const double&,
    const std::optional<Box>&);
template std::vector<std::vector<Rational>> pansu_trick_points<Rational, Rational>(
    const CarnotGroup&, const VecQ&, const BasicWord<Rational>&, const Rational&,
    const std::optional<Box>&);

// ---------------------------------------------------------------------------
// Modulus of continuity
// ---------------------------------------------------------------------------

double ModulusOfContinuity::eval(double t) const {
  if (t <= 0.0 || knots.empty()) return 0.0;
  if (t >= knots.back()) {
    // extend with the final slope (concavity-preserving)
    size_t k = knots.size();
    double slope = k >= 2 ? (values[k - 1] - values[k - 2]) / (knots[k - 1] - knots[k - 2]) : 0.0;
    return values.back() + slope * (t - knots.back());
  }
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  size_t k = static_cast<size_t>(std::distance(knots.begin(), it));
  double w = (t - knots[k - 1]) / (knots[k] - knots[k - 1]);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

bool ModulusOfContinuity::invariants_hold(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (knots.empty() || knots.front() != 0.0 || values.front() != 0.0)
    return fail("omega(0) != 0");
  double prev_slope = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < knots.size(); ++k) {
    if (knots[k] <= knots[k - 1]) return fail("knots not increasing");
    if (values[k] < values[k - 1] - 1e-15) return fail("omega decreasing");
    double slope = (values[k] - values[k - 1]) / (knots[k] - knots[k - 1]);
    if (slope > prev_slope * (1.0 + 1e-9) + 1e-15) return fail("omega not concave");
    prev_slope = slope;
  }
  // omega(Ct) <= C omega(t) on a grid
  for (double c : {1.0, 1.5, 2.0, 4.0, 10.0}) {
    for (double t = knots.back() / 64.0; t <= knots.back(); t *= 2.0) {
      if (eval(c * t) > c * eval(t) * (1.0 + 1e-9) + 1e-18) return fail("omega(Ct) > C omega(t)");
    }
  }
  return true;
}

ModulusOfContinuity estimate_modulus(const CarnotMap& f, const ExperimentRegion& region,
                                     long samples, uint64_t seed) {
  Rng rng(seed);
  const auto& src = *f.source;
  const int tn = f.target->horizontal_dim();
  std::vector<std::pair<double, double>> data;
  data.reserve(static_cast<size_t>(samples));
  double max_g = 0.0;
  for (long it = 0; it < samples; ++it) {
    VecD x = region.a_box.sample(rng);
    double u = it % 2 == 0 ? rng.uniform() : std::pow(10.0, rng.uniform(-6.0, 0.0));
    VecD w = src.dilate(region.enlarged_radius * u, src.random_unit_sphere(rng));
    VecD y = src.multiply(x, w);  // dist(y, A) <= |w| <= half boundary distance
    double d = src.distance(x, y);
    double g = 0.0;
    for (int i = 0; i < tn; ++i) {
      VecD gx = f.gradient(i, x), gy = f.gradient(i, y);
      VecD diff(gx.size());
      for (size_t l = 0; l < gx.size(); ++l) diff[l] = gx[l] - gy[l];
      g = std::max(g, euclidean_norm(diff));
    }
    data.push_back({d, g});
    max_g = std::max(max_g, g);
  }

  ModulusOfContinuity omega;
  if (max_g < 1e-14) {
    // constant gradients: a genuine modulus must be non-constant, so flag
    // the degenerate case and return a vanishing linear placeholder
    omega.degenerate = true;
    omega.knots = {0.0, 1.0};
    omega.values = {0.0, 1e-15};
    return omega;
  }

  std::sort(data.begin(), data.end());
  // upper concave hull anchored at (0, 0)
  std::vector<std::pair<double, double>> hull{{0.0, 0.0}};
  auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  for (const auto& p : data) {
    if (p.first <= 0.0) continue;
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  // enforce monotonicity: level off past the peak
  std::vector<std::pair<double, double>> mono{hull.front()};
  for (size_t k = 1; k < hull.size(); ++k) {
    if (hull[k].second < mono.back().second) {
      mono.push_back({hull.back().first, mono.back().second});
      break;
    }
    mono.push_back(hull[k]);
  }
  for (const auto& [d, g] : mono) {
    omega.knots.push_back(d);
    omega.values.push_back(g);
  }
  return omega;
}

// ---------------------------------------------------------------------------
// Experiment regions
// ---------------------------------------------------------------------------

namespace {

std::vector<VecD> box_corners(const Box& box) {
  const int dim = box.dim();
  std::vector<VecD> corners;
  corners.reserve(static_cast<size_t>(1) << dim);
  for (int mask = 0; mask < (1 << dim); ++mask) {
    VecD p(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i)
      p[static_cast<size_t>(i)] =
          (mask >> i) & 1 ? box.hi[static_cast<size_t>(i)] : box.lo[static_cast<size_t>(i)];
    corners.push_back(std::move(p));
  }
  return corners;
}

std::vector<VecD> boundary_points(const Box& box, long count, Rng& rng) {
  const int dim = box.dim();
  std::vector<VecD> points = box_corners(box);
  for (long it = 0; it < count; ++it) {
    VecD p = box.sample(rng);
    int face = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(2 * dim)));
    int axis = face / 2;
    p[static_cast<size_t>(axis)] =
        face % 2 == 0 ? box.lo[static_cast<size_t>(axis)] : box.hi[static_cast<size_t>(axis)];
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace

ExperimentRegion make_region(const DecompositionScheme& scheme, const Box& a_box,
                             const std::optional<Box>& omega, double t_cap, long samples,
                             uint64_t seed) {
  const auto& g = scheme.group();
  if (a_box.degenerate()) throw std::invalid_argument("region: degenerate A box");
  if (omega) {
    for (int i = 0; i < g.dim(); ++i) {
      if (a_box.lo[static_cast<size_t>(i)] < omega->lo[static_cast<size_t>(i)] ||
          a_box.hi[static_cast<size_t>(i)] > omega->hi[static_cast<size_t>(i)])
        throw std::invalid_argument("region: A must sit inside the domain box");
    }
  }

  ExperimentRegion region;
  region.a_box = a_box;
  region.omega = omega;
  region.t_cap = t_cap;

  Rng rng(seed);
  auto constants = scheme.estimate_constants(std::max<long>(200, samples / 4), seed ^ 0x51ed);
  region.k0 = constants.k0;
  region.c0 = constants.c0;
  region.sup_xi = sup_euclidean_on_unit_sphere(g, std::max<long>(500, samples / 2), seed ^ 0xa11ce);

  if (!omega) {
    region.boundary_distance = std::numeric_limits<double>::infinity();
    region.enlarged_radius = std::numeric_limits<double>::infinity();
    region.t_horizon = t_cap;
    return region;
  }

  auto a_points = boundary_points(a_box, samples / 2, rng);
  {
    // interior samples of A matter too when the metric ball is anisotropic
    for (long it = 0; it < samples / 4; ++it) a_points.push_back(a_box.sample(rng));
  }
  auto omega_points = boundary_points(*omega, samples, rng);
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& a : a_points)
    for (const auto& y : omega_points) dist = std::min(dist, g.distance(a, y));
  region.boundary_distance = dist;
  region.enlarged_radius = dist / 2.0;
  region.t_horizon =
      std::min(t_cap, dist / (2.0 * region.k0 * region.c0 * std::max(region.sup_xi, 1e-12)));
  return region;
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

std::vector<Rational> make_t_grid(double t_max, int points, double decades, int snap_bits) {
  if (points < 2) throw std::invalid_argument("t grid needs at least 2 points");
  if (!(t_max > 0.0)) throw std::invalid_argument("t grid needs a positive horizon");
  std::vector<Rational> grid;
  grid.reserve(static_cast<size_t>(points));
  for (int k = points - 1; k >= 0; --k) {
    double t = t_max * std::pow(10.0, -decades * k / (points - 1));
    grid.push_back(Rational::snap(t, snap_bits));  // ascending
  }
  return grid;
}

std::vector<HorizontalWordQ> make_xi_words(const DecompositionScheme& scheme, int count,
                                           uint64_t seed, int snap_bits) {
  const auto& g = scheme.group();
  const int dim = g.dim();
  std::vector<VecD> targets;
  for (int j = 0; j < g.horizontal_dim(); ++j) {
    for (double s : {1.0, -1.0}) {
      VecD e(static_cast<size_t>(dim), 0.0);
      e[static_cast<size_t>(j)] = s;
      targets.push_back(std::move(e));
    }
  }
  for (int i = g.horizontal_dim(); i < dim; ++i) {
    int d = g.strat().degree[static_cast<size_t>(i)];
    double c = std::pow(g.norm().mu[static_cast<size_t>(i)], -d);
    for (double s : {1.0, -1.0}) {
      VecD e(static_cast<size_t>(dim), 0.0);
      e[static_cast<size_t>(i)] = s * c;  // homogeneous norm exactly 1
      targets.push_back(std::move(e));
    }
  }
  Rng rng(seed);
  while (static_cast<int>(targets.size()) < count) targets.push_back(g.random_unit_sphere(rng));
  if (static_cast<int>(targets.size()) > count) targets.resize(static_cast<size_t>(count));

  std::vector<HorizontalWordQ> words;
  words.reserve(targets.size());
  for (const auto& t : targets) words.push_back(scheme.decompose_snapped(t, snap_bits));
  return words;
}

std::vector<VecQ> make_x_set(const ExperimentRegion& region, int count, uint64_t seed,
                             int snap_bits) {
  const Box& a = region.a_box;
  const int dim = a.dim();
  std::vector<VecD> points;
  {
    VecD center(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i)
      center[static_cast<size_t>(i)] =
          0.5 * (a.lo[static_cast<size_t>(i)] + a.hi[static_cast<size_t>(i)]);
    points.push_back(std::move(center));
  }
  // two opposite near-corner probes: the nonlinear terms peak there
  for (double side : {0.9, -0.9}) {
    VecD p(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      double mid = 0.5 * (a.lo[static_cast<size_t>(i)] + a.hi[static_cast<size_t>(i)]);
      double half = 0.5 * (a.hi[static_cast<size_t>(i)] - a.lo[static_cast<size_t>(i)]);
      p[static_cast<size_t>(i)] = mid + side * half;
    }
    points.push_back(std::move(p));
  }
  Rng rng(seed);
  while (static_cast<int>(points.size()) < count) points.push_back(a.sample(rng));
  if (static_cast<int>(points.size()) > count) points.resize(static_cast<size_t>(count));

  std::vector<VecQ> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(snap_vector(p, snap_bits));
  return out;
}

RateStudy run_rate_study(const CarnotMap& f, const ExperimentRegion& region,
                         const ModulusOfContinuity& omega,
                         const std::vector<HorizontalWordQ>& xi_words,
                         const std::vector<VecQ>& x_set, const std::vector<Rational>& t_grid) {
  const auto& tgt = *f.target;
  RateStudy study;
  study.bound_exponent = 1.0 / std::pow(tgt.step(), region.k0);
  study.t_grid.reserve(t_grid.size());
  for (const auto& t : t_grid) study.t_grid.push_back(t.to_double());
  study.max_error.assign(t_grid.size(), 0.0);

  for (const auto& x : x_set) {
    for (const auto& word : xi_words) {
      RateSample sample;
      sample.x = to_double_vec(x);
      sample.xi = to_double_vec(word.product);
      VecQ z = pansu_derivative_word(f, x, word);
      std::vector<double> errs;
      errs.reserve(t_grid.size());
      for (size_t k = 0; k < t_grid.size(); ++k) {
        VecQ r = difference_quotient(f, x, word.product, t_grid[k], region.omega);
        double err = tgt.distance(r, z);
        double bound = std::pow(omega.eval(study.t_grid[k]), study.bound_exponent);
        sample.points.push_back({study.t_grid[k], err, bound});
        errs.push_back(err);
        if (bound > 1e-300) sample.c_hat = std::max(sample.c_hat, err / bound);
        study.max_error[k] = std::max(study.max_error[k], err);
      }
      sample.slope = log_log_slope(study.t_grid, errs);
      study.c_hat = std::max(study.c_hat, sample.c_hat);
      study.samples.push_back(std::move(sample));
    }
  }

  study.slope_of_max = log_log_slope(study.t_grid, study.max_error);
  double small = study.max_error.front(), large = study.max_error.back();
  study.ratio_small_over_large = large > 0.0 ? small / large : 0.0;
  double overall = *std::max_element(study.max_error.begin(), study.max_error.end());
  study.decayed = (overall <= 1e-10) || (small < large && study.slope_of_max >= 0.1);
  return study;
}

TrickStudy run_trick_study(const CarnotMap& f, const ExperimentRegion& region,
                           const DecompositionScheme& scheme, long samples, uint64_t seed) {
  Rng rng(seed);
  const auto& src = *f.source;
  TrickStudy study;
  study.samples = samples;
  study.seed = seed;
  for (long it = 0; it < samples; ++it) {
    VecQ x = snap_vector(region.a_box.sample(rng), 12);
    HorizontalWordQ word = scheme.decompose_snapped(src.random_unit_sphere(rng), 20);
    Rational t = Rational::snap(region.t_horizon * rng.uniform(0.25, 1.0), 20);
    double resid = pansu_trick_residual(f, x, word, t, region.omega);
    study.residuals.push_back(resid);
    study.max_residual = std::max(study.max_residual, resid);
  }
  return study;
}

BridgeStudy run_bridge_study(const CarnotMap& f, const ExperimentRegion& region,
                             const ModulusOfContinuity& omega,
                             const std::vector<HorizontalWordQ>& xi_words,
                             const std::vector<VecQ>& x_set, const std::vector<Rational>& t_grid) {
  const auto& tgt = *f.target;
  BridgeStudy study;
  study.bound_exponent = 1.0 / std::pow(tgt.step(), region.k0);
  study.t_grid.reserve(t_grid.size());
  for (const auto& t : t_grid) study.t_grid.push_back(t.to_double());
  study.max_d_z.assign(t_grid.size(), 0.0);
  study.max_d_r.assign(t_grid.size(), 0.0);

  for (const auto& x : x_set) {
    for (const auto& word : xi_words) {
      VecQ z = pansu_derivative_word(f, x, word);
      for (size_t k = 0; k < t_grid.size(); ++k) {
        VecQ z0 = trick_point_derivative(f, x, word, t_grid[k], region.omega);
        VecQ r = difference_quotient(f, x, word.product, t_grid[k], region.omega);
        double dz = tgt.distance(z, z0);
        double dr = tgt.distance(r, z0);
        study.max_d_z[k] = std::max(study.max_d_z[k], dz);
        study.max_d_r[k] = std::max(study.max_d_r[k], dr);
        double bound = std::pow(omega.eval(study.t_grid[k]), study.bound_exponent);
        if (bound > 1e-300) {
          study.c_hat_z = std::max(study.c_hat_z, dz / bound);
          study.c_hat_r = std::max(study.c_hat_r, dr / bound);
        }
      }
    }
  }

  auto finish = [&](const std::vector<double>& curve, double& ratio, bool& decayed) {
    double small = curve.front(), large = curve.back();
    ratio = large > 0.0 ? small / large : 0.0;
    double overall = *std::max_element(curve.begin(), curve.end());
    double slope = log_log_slope(study.t_grid, curve);
    decayed = (overall <= 1e-10) || (small < large && slope >= 0.1);
  };
  finish(study.max_d_z, study.ratio_z, study.decayed_z);
  finish(study.max_d_r, study.ratio_r, study.decayed_r);
  return study;
}

ContinuityStudy run_continuity_study(const CarnotMap& f, const ExperimentRegion& region,
                                     const DecompositionScheme& scheme, int xi_count,
                                     int pairs_per_scale, const std::vector<double>& scales,
                                     uint64_t seed) {
  Rng rng(seed);
  const auto& src = *f.source;
  const auto& tgt = *f.target;

  // fixed direction set, reused across both points of every pair
  std::vector<HorizontalWord> words;
  {
    auto exact_words = make_xi_words(scheme, xi_count, seed ^ 0xc0411, 20);
    words.reserve(exact_words.size());
    for (const auto& w : exact_words) {
      HorizontalWord wd;
      for (const auto& letter : w.letters)
        wd.letters.push_back({letter.direction, letter.amplitude.to_double()});
      wd.product = to_double_vec(w.product);
      words.push_back(std::move(wd));
    }
  }

  ContinuityStudy study;
  study.scales = scales;
  for (double scale : scales) {
    double worst = 0.0;
    for (int p = 0; p < pairs_per_scale; ++p) {
      VecD x = region.a_box.sample(rng);
      VecD dir;
      if (p % 2 == 0) {
        dir = src.random_unit_sphere(rng);
      } else {
        // horizontal displacement: the gradients vary fastest along the
        // first layer
        VecD h(static_cast<size_t>(src.dim()), 0.0);
        double mx = 0.0;
        for (int j = 0; j < src.horizontal_dim(); ++j) {
          h[static_cast<size_t>(j)] = rng.uniform(-1.0, 1.0);
          mx = std::max(mx, std::fabs(h[static_cast<size_t>(j)]));
        }
        if (mx < 1e-9) {
          h[0] = 1.0;
          mx = 1.0;
        }
        dir = src.dilate(1.0 / mx, h);
      }
      VecD xp = src.multiply(x, src.dilate(scale, dir));  // d(x, xp) = scale
      if (!region.in_omega(xp)) continue;
      for (const auto& word : words) {
        VecD zx = pansu_derivative_word(f, x, word);
        VecD zxp = pansu_derivative_word(f, xp, word);
        worst = std::max(worst, tgt.distance(zx, zxp));
      }
    }
    study.modulus.push_back(worst);
  }
  double largest = study.modulus.front();
  double smallest = study.modulus.back();
  study.ratio_smallest_over_largest = largest > 0.0 ? smallest / largest : 0.0;
  return study;
}

}  // namespace carnot

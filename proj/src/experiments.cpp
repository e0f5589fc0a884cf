#include "carnot/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace carnot {

namespace {

std::string join(const VecD& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i != 0) out += " ";
    out += format_double(v[i]);
  }
  return out;
}

std::string csv_header(bool timestamp) {
  if (!timestamp) return "";
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf + "\n";
}

std::shared_ptr<CarnotGroup> resolve_group(const std::string& name, long samples, uint64_t seed) {
  std::shared_ptr<CarnotGroup> g;
  if (name.find(".json") != std::string::npos || std::filesystem::exists(name)) {
    auto algebra = load_algebra_json(name);
    auto report = validate(algebra);
    if (!report.pass()) throw ConfigError("algebra file fails validation: " + name);
    g = make_group(algebra);
  } else {
    g = make_group(name);
  }
  g->set_norm(calibrate_norm(*g, std::max<long>(samples, 4000), seed ^ 0x6e07));
  return g;
}

struct Artifacts {
  std::string dir;
  bool timestamp = true;

  bool enabled() const { return !dir.empty(); }
  void write(const std::string& name, const std::string& body) const {
    if (!enabled()) return;
    std::filesystem::create_directories(dir);
    write_text_atomic(dir + "/" + name, body);
  }
};

// --------------------------------------------------------------------------
// suites
// --------------------------------------------------------------------------

std::shared_ptr<CarnotGroup> resolve_group_uncalibrated(const std::string& name) {
  if (name.find(".json") != std::string::npos || std::filesystem::exists(name)) {
    auto algebra = load_algebra_json(name);
    auto report = validate(algebra);
    if (!report.pass()) throw ConfigError("algebra file fails validation: " + name);
    return make_group(algebra);
  }
  return make_group(name);
}

int run_law(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group_uncalibrated(cfg.group);
  auto check = verify_group_law(g->law());

  // rational associativity spot check
  Rng rng(cfg.seed);
  bool assoc = true;
  for (int it = 0; it < 200 && assoc; ++it) {
    VecQ a(static_cast<size_t>(g->dim())), b(static_cast<size_t>(g->dim())),
        c(static_cast<size_t>(g->dim()));
    for (int i = 0; i < g->dim(); ++i) {
      a[static_cast<size_t>(i)] = Rational(static_cast<long long>(rng.uniform_int(33)) - 16, 8);
      b[static_cast<size_t>(i)] = Rational(static_cast<long long>(rng.uniform_int(33)) - 16, 8);
      c[static_cast<size_t>(i)] = Rational(static_cast<long long>(rng.uniform_int(33)) - 16, 8);
    }
    auto lhs = g->multiply(g->multiply(a, b), c);
    auto rhs = g->multiply(a, g->multiply(b, c));
    for (int i = 0; i < g->dim(); ++i)
      if (lhs[static_cast<size_t>(i)] != rhs[static_cast<size_t>(i)]) assoc = false;
  }

  std::printf("group law for %s (N=%d, n=%d, s=%d)\n", g->name().c_str(), g->dim(),
              g->horizontal_dim(), g->step());
  for (int i = 0; i < g->dim(); ++i)
    std::printf("  Q_%d = %s\n", i + 1, g->law().q_to_string(i).c_str());

  nlohmann::json out;
  out["group"] = g->name();
  out["checks"] = {{"horizontal_vanishes", check.horizontal_vanishes},
                   {"axis_diagonal_vanish", check.axis_diagonal_vanish},
                   {"homogeneous", check.homogeneous},
                   {"lower_degree_only", check.lower_degree_only},
                   {"associativity_rational", assoc}};
  nlohmann::json qj = nlohmann::json::array();
  for (int i = 0; i < g->dim(); ++i) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : g->law().q[static_cast<size_t>(i)].terms()) {
      nlohmann::json term;
      Rational cc = c;
      cc.reduce();
      term["coeff"] = cc.to_string();
      term["x"] = std::vector<int>(m.e.begin(), m.e.begin() + g->dim());
      term["y"] = std::vector<int>(m.e.begin() + g->dim(), m.e.end());
      terms.push_back(term);
    }
    qj.push_back(terms);
  }
  out["Q"] = qj;
  if (cfg.print_json) std::printf("%s\n", out.dump(2).c_str());
  art.write("law_summary.json", out.dump(2) + "\n");
  return check.pass() && assoc ? 0 : 1;
}

int run_calibrate(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  const auto& norm = g->norm();
  nlohmann::json summary;
  summary["group"] = g->name();
  summary["mu"] = norm.mu;
  summary["certificate"] = {{"seed", norm.certificate.seed},
                            {"samples", norm.certificate.samples},
                            {"min_slack", norm.certificate.min_slack},
                            {"method", norm.certificate.method}};
  art.write("calibrate_summary.json", summary.dump(2) + "\n");
  std::printf("calibrated %s:", g->name().c_str());
  for (double m : norm.mu) std::printf(" %s", format_double(m).c_str());
  std::printf("  (min slack %s over %ld fresh pairs)\n",
              format_double(norm.certificate.min_slack).c_str(), norm.certificate.samples);
  return norm.certificate.min_slack >= 0.0 ? 0 : 1;
}

int run_metric(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  const int dim = g->dim();
  Rng rng(cfg.seed ^ 0xfaceULL);
  Box box{VecD(static_cast<size_t>(dim), -2.0), VecD(static_cast<size_t>(dim), 2.0)};

  long axiom_samples = std::max<long>(1000, cfg.samples / 10);
  long hom_bad = 0, left_bad = 0, sym_bad = 0;
  for (long it = 0; it < axiom_samples; ++it) {
    VecD p = box.sample(rng), q = box.sample(rng), a = box.sample(rng);
    double d = g->distance(p, q);
    for (double t : {0.5, 2.0}) {
      double dd = g->distance(g->dilate(t, p), g->dilate(t, q));
      if (std::fabs(dd - t * d) > 1e-12 * (1.0 + t * d)) ++hom_bad;
    }
    double dl = g->distance(g->multiply(a, p), g->multiply(a, q));
    if (std::fabs(dl - d) > 1e-12 * (1.0 + d)) ++left_bad;
    if (std::fabs(g->distance(q, p) - d) > 1e-12 * (1.0 + d)) ++sym_bad;
  }

  // fresh-seed triangle inequality on general pairs
  long triangle_bad = 0;
  {
    Rng fresh(cfg.seed ^ 0x7714e6);
    for (long it = 0; it < cfg.samples; ++it) {
      VecD x = box.sample(fresh), y = box.sample(fresh);
      double lhs = g->norm_value(g->multiply(x, y));
      if (lhs > g->norm_value(x) + g->norm_value(y) + 1e-12) ++triangle_bad;
    }
  }

  std::string csv = csv_header(art.timestamp);
  csv += "estimate,seed,samples,value\n";
  nlohmann::json summary;
  auto add_row = [&](const std::string& name, uint64_t seed, long samples, double value) {
    csv += name + "," + std::to_string(seed) + "," + std::to_string(samples) + "," +
           format_double(value) + "\n";
  };

  long est_samples = std::max<long>(500, cfg.samples / 20);
  std::vector<double> holder_vals, right_vals, word_vals;
  for (uint64_t s = 0; s < 3; ++s) {
    auto h = holder_comparison(*g, box, est_samples, cfg.seed + s);
    holder_vals.push_back(h.value);
    add_row("holder_C_K", h.seed, h.samples, h.value);
    auto r = right_translation_estimate(*g, 2.0, est_samples, cfg.seed + 10 + s);
    right_vals.push_back(r.value);
    add_row("right_translation_C", r.seed, r.samples, r.value);
  }
  const int k0 = 4;
  std::vector<double> alphas{1e-1, 1e-2, 1e-3, 1e-4}, word_dists;
  for (uint64_t s = 0; s < 3; ++s) {
    auto w = word_distance_estimate(*g, k0, alphas[0], 2.0, est_samples / 2, cfg.seed + 20 + s);
    word_vals.push_back(w.max_ratio);
    add_row("word_distance_C", cfg.seed + 20 + s, w.samples, w.max_ratio);
  }
  for (double alpha : alphas) {
    auto w = word_distance_estimate(*g, k0, alpha, 2.0, est_samples / 2, cfg.seed + 31);
    word_dists.push_back(w.max_distance);
    add_row("word_distance_at_alpha_" + format_double(alpha), cfg.seed + 31, w.samples,
            w.max_distance);
  }
  double decay_slope = log_log_slope(alphas, word_dists);
  double decay_required = 1.0 / std::pow(g->step(), k0 - 1) - 0.05;
  add_row("word_distance_decay_slope", cfg.seed + 31, est_samples / 2, decay_slope);

  auto stability = [](const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  };

  summary["group"] = g->name();
  summary["mu"] = g->norm().mu;
  summary["certificate"] = {{"seed", g->norm().certificate.seed},
                            {"samples", g->norm().certificate.samples},
                            {"min_slack", g->norm().certificate.min_slack},
                            {"method", g->norm().certificate.method}};
  summary["axioms"] = {{"homogeneity_violations", hom_bad},
                       {"left_invariance_violations", left_bad},
                       {"symmetry_violations", sym_bad},
                       {"triangle_violations", triangle_bad}};
  summary["stability"] = {{"holder", stability(holder_vals)},
                          {"right_translation", stability(right_vals)},
                          {"word_distance", stability(word_vals)}};
  summary["word_decay"] = {{"slope", decay_slope}, {"required", decay_required}};
  bool pass = hom_bad == 0 && left_bad == 0 && sym_bad == 0 && triangle_bad == 0 &&
              stability(holder_vals) < 2.0 && stability(right_vals) < 2.0 &&
              stability(word_vals) < 2.0 && decay_slope >= decay_required;
  summary["pass"] = pass;
  art.write("metric.csv", csv);
  art.write("metric_summary.json", summary.dump(2) + "\n");
  std::printf("metric suite for %s: %s\n", g->name().c_str(), pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_lift(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  HorizontalControl control = parse_control_spec(cfg.control_spec, g->horizontal_dim());
  VecQ x0 = cfg.point.empty() ? g->identity<Rational>() : snap_vector(cfg.point, 30);
  Curve curve = lift(g, x0, control, 257);
  auto report = is_horizontal(curve, 1e-8);

  std::string csv = csv_header(art.timestamp);
  csv += "t";
  for (int i = 0; i < g->dim(); ++i) csv += ",x" + std::to_string(i + 1);
  csv += "\n";
  for (size_t k = 0; k < curve.times.size(); ++k) {
    csv += format_double(curve.times[k]);
    for (double v : curve.points[k]) csv += "," + format_double(v);
    csv += "\n";
  }
  nlohmann::json summary;
  summary["group"] = g->name();
  summary["horizontal"] = report.pass;
  summary["symbolic"] = report.symbolic;
  summary["max_residual"] = report.max_residual;
  summary["endpoint"] = curve.points.back();
  art.write("lift.csv", csv);
  art.write("lift_summary.json", summary.dump(2) + "\n");
  std::printf("lift: endpoint %s, horizontality residual %s\n", join(curve.points.back()).c_str(),
              format_double(report.max_residual).c_str());
  return report.pass ? 0 : 1;
}

int run_ray_error(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  HorizontalControl control = parse_control_spec(cfg.control_spec, g->horizontal_dim());
  VecQ x0 = cfg.point.empty() ? g->identity<Rational>() : snap_vector(cfg.point, 30);
  Curve curve = lift(g, x0, control, 257);

  double t_max = curve.horizon() / 10.0;
  std::vector<double> grid;
  for (int k = 0; k < cfg.t_points; ++k)
    grid.push_back(t_max * std::pow(10.0, -cfg.t_decades * (cfg.t_points - 1 - k) /
                                              std::max(1, cfg.t_points - 1)));
  auto study = ray_error_study(curve, grid);

  std::string csv = csv_header(art.timestamp);
  csv += "t,error\n";
  std::string dat;
  for (size_t k = 0; k < study.t.size(); ++k) {
    csv += format_double(study.t[k]) + "," + format_double(study.error[k]) + "\n";
    dat += format_double(study.t[k]) + " " + format_double(study.error[k]) + "\n";
  }
  nlohmann::json summary;
  summary["group"] = g->name();
  summary["slope"] = study.degenerate ? nlohmann::json("degenerate") : nlohmann::json(study.slope);
  summary["c_hat"] = study.c_hat;
  summary["expected_rate"] = 1.0 + 1.0 / g->step();
  art.write("ray_error.csv", csv);
  art.write("ray_error.dat", dat);
  art.write("ray_error_summary.json", summary.dump(2) + "\n");
  std::printf("ray error slope %s (expected >= %s)\n",
              study.degenerate ? "degenerate" : format_double(study.slope).c_str(),
              format_double(1.0 + 1.0 / g->step()).c_str());
  return 0;
}

int run_decompose(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  auto scheme = DecompositionScheme::build(g);
  if (cfg.point.empty()) throw ConfigError("decompose needs --point");
  auto word = scheme.decompose(cfg.point);

  std::string csv = csv_header(art.timestamp);
  csv += "k,direction,amplitude\n";
  int k = static_cast<int>(word.letters.size());
  for (const auto& letter : word.letters) {
    csv += std::to_string(k--) + "," + std::to_string(letter.direction + 1) + "," +
           format_double(letter.amplitude) + "\n";
  }
  nlohmann::json summary;
  summary["group"] = g->name();
  summary["k0"] = scheme.word_length();
  summary["residual_inf"] = word.residual_inf;
  summary["product"] = word.product;
  art.write("decompose.csv", csv);
  art.write("decompose_summary.json", summary.dump(2) + "\n");
  std::printf("word of length %d, residual %s\n", scheme.word_length(),
              format_double(word.residual_inf).c_str());
  for (const auto& letter : word.letters)
    if (std::fabs(letter.amplitude) > 0)
      std::printf("  e_%d * %s\n", letter.direction + 1, format_double(letter.amplitude).c_str());
  return word.residual_inf <= 1e-9 * (1.0 + inf_norm(cfg.point)) ? 0 : 1;
}

int run_constants(const ExperimentConfig& cfg, const Artifacts& art) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  auto scheme = DecompositionScheme::build(g);
  auto constants = scheme.estimate_constants(std::max<long>(500, cfg.samples / 10), cfg.seed);
  double sup = sup_euclidean_on_unit_sphere(*g, std::max<long>(500, cfg.samples / 10), cfg.seed + 1);
  nlohmann::json summary;
  summary["group"] = g->name();
  summary["k0"] = constants.k0;
  summary["C0"] = constants.c0;
  summary["sup_euclid_unit_sphere"] = sup;
  summary["samples"] = constants.samples;
  summary["seed"] = constants.seed;
  art.write("constants_summary.json", summary.dump(2) + "\n");
  std::printf("k0 = %d, C0 = %s, sup_{|xi|=1} |xi|_2 = %s\n", constants.k0,
              format_double(constants.c0).c_str(), format_double(sup).c_str());
  return 0;
}

struct PansuSetup {
  std::shared_ptr<CarnotGroup> group;
  CarnotMap map;
  DecompositionScheme scheme;
  ExperimentRegion region;
  ModulusOfContinuity omega;
};

PansuSetup pansu_setup(const ExperimentConfig& cfg) {
  auto g = resolve_group(cfg.group, cfg.samples, cfg.seed);
  CarnotMap map = parse_map_spec(cfg.map_spec, g);
  if (!cfg.a_box) throw ConfigError("pansu suites need an A box");
  auto scheme = DecompositionScheme::build(g);
  auto region = make_region(scheme, *cfg.a_box, cfg.omega_box, cfg.t_cap,
                            std::max<long>(400, cfg.samples / 50), cfg.seed ^ 0x9e91);
  auto omega = estimate_modulus(map, region, std::max<long>(2000, cfg.samples / 10),
                                cfg.seed ^ 0x3177);
  return {g, std::move(map), std::move(scheme), std::move(region), std::move(omega)};
}

int run_pansu_rate(const ExperimentConfig& cfg, const Artifacts& art) {
  auto setup = pansu_setup(cfg);
  auto words = make_xi_words(setup.scheme, cfg.xi_count, cfg.seed ^ 0x5e7);
  auto x_set = make_x_set(setup.region, cfg.x_count, cfg.seed ^ 0x8a3);
  auto grid = make_t_grid(setup.region.t_horizon, cfg.t_points, cfg.t_decades);
  auto study = run_rate_study(setup.map, setup.region, setup.omega, words, x_set, grid);
  auto bridge =
      run_bridge_study(setup.map, setup.region, setup.omega, words, x_set, grid);

  std::string csv = csv_header(art.timestamp);
  csv += "x,xi,t,error,bound_value\n";
  for (const auto& sample : study.samples) {
    for (const auto& p : sample.points) {
      csv += "\"" + join(sample.x) + "\",\"" + join(sample.xi) + "\"," + format_double(p.t) + "," +
             format_double(p.error) + "," + format_double(p.bound) + "\n";
    }
  }
  std::string dat;
  for (size_t k = 0; k < study.t_grid.size(); ++k)
    dat += format_double(study.t_grid[k]) + " " + format_double(study.max_error[k]) + "\n";

  nlohmann::json summary;
  summary["group"] = setup.group->name();
  summary["map"] = setup.map.description;
  summary["region"] = {{"t_A", setup.region.t_horizon},
                       {"boundary_distance", setup.region.boundary_distance},
                       {"k0", setup.region.k0},
                       {"C0", setup.region.c0},
                       {"sup_xi", setup.region.sup_xi}};
  summary["bound_exponent"] = study.bound_exponent;
  summary["c_hat"] = study.c_hat;
  summary["slope_of_max"] = study.slope_of_max;
  summary["ratio_small_over_large"] = study.ratio_small_over_large;
  summary["decayed"] = study.decayed;
  summary["max_error_at_t_A"] = study.max_error.back();
  summary["max_error_at_t_min"] = study.max_error.front();
  summary["bridge"] = {{"c_hat_z", bridge.c_hat_z},     {"c_hat_r", bridge.c_hat_r},
                       {"ratio_z", bridge.ratio_z},     {"ratio_r", bridge.ratio_r},
                       {"decayed_z", bridge.decayed_z}, {"decayed_r", bridge.decayed_r}};
  summary["modulus_degenerate"] = setup.omega.degenerate;
  summary["modulus_knots"] = setup.omega.knots;
  summary["modulus_values"] = setup.omega.values;
  bool pass = study.decayed && std::isfinite(study.c_hat) && bridge.decayed_z && bridge.decayed_r;
  summary["pass"] = pass;
  art.write("pansu_rate.csv", csv);
  art.write("pansu_rate.dat", dat);
  art.write("pansu_rate_summary.json", summary.dump(2) + "\n");
  std::printf("pansu rate: C_hat %s, slope %s, ratio %s, %s\n", format_double(study.c_hat).c_str(),
              format_double(study.slope_of_max).c_str(),
              format_double(study.ratio_small_over_large).c_str(), pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_pansu_trick(const ExperimentConfig& cfg, const Artifacts& art) {
  auto setup = pansu_setup(cfg);
  long count = std::min<long>(cfg.samples, 100);
  auto study = run_trick_study(setup.map, setup.region, setup.scheme, count, cfg.seed ^ 0x771c);

  std::string csv = csv_header(art.timestamp);
  csv += "sample,residual\n";
  for (size_t k = 0; k < study.residuals.size(); ++k)
    csv += std::to_string(k) + "," + format_double(study.residuals[k]) + "\n";
  nlohmann::json summary;
  summary["group"] = setup.group->name();
  summary["map"] = setup.map.description;
  summary["samples"] = study.samples;
  summary["max_residual"] = study.max_residual;
  bool pass = study.max_residual <= 1e-10;
  summary["pass"] = pass;
  art.write("pansu_trick.csv", csv);
  art.write("pansu_trick_summary.json", summary.dump(2) + "\n");
  std::printf("pansu trick: max residual %s over %ld samples, %s\n",
              format_double(study.max_residual).c_str(), study.samples, pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_continuity(const ExperimentConfig& cfg, const Artifacts& art) {
  auto setup = pansu_setup(cfg);
  std::vector<double> scales{1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  auto study = run_continuity_study(setup.map, setup.region, setup.scheme, cfg.xi_count / 2, 24,
                                    scales, cfg.seed ^ 0xc017);

  std::string csv = csv_header(art.timestamp);
  csv += "scale,modulus\n";
  std::string dat;
  for (size_t k = 0; k < scales.size(); ++k) {
    csv += format_double(study.scales[k]) + "," + format_double(study.modulus[k]) + "\n";
    dat += format_double(study.scales[k]) + " " + format_double(study.modulus[k]) + "\n";
  }
  nlohmann::json summary;
  summary["group"] = setup.group->name();
  summary["map"] = setup.map.description;
  summary["ratio_smallest_over_largest"] = study.ratio_smallest_over_largest;
  bool pass = study.modulus.front() == 0.0 || study.ratio_smallest_over_largest < 1e-2;
  summary["pass"] = pass;
  art.write("continuity.csv", csv);
  art.write("continuity.dat", dat);
  art.write("continuity_summary.json", summary.dump(2) + "\n");
  std::printf("continuity modulus ratio %s, %s\n",
              format_double(study.ratio_smallest_over_largest).c_str(), pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_algebra_validate(const ExperimentConfig& cfg, const Artifacts& art) {
  CarnotAlgebra algebra = std::filesystem::exists(cfg.group) ? load_algebra_json(cfg.group)
                                                             : catalog(cfg.group);
  auto report = validate(algebra);
  nlohmann::json summary;
  summary["name"] = algebra.name;
  summary["antisymmetry"] = report.antisymmetry;
  summary["jacobi"] = report.jacobi;
  summary["grading"] = report.grading;
  summary["generation"] = report.generation;
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& issue : report.issues)
    issues.push_back({{"invariant", issue.invariant},
                      {"witness", issue.witness},
                      {"detail", issue.detail}});
  summary["issues"] = issues;
  art.write("validate_summary.json", summary.dump(2) + "\n");
  std::printf("validate %s: %s\n", algebra.name.c_str(), report.pass() ? "pass" : "FAIL");
  for (const auto& issue : report.issues)
    std::printf("  %s: %s\n", issue.invariant.c_str(), issue.detail.c_str());
  return report.pass() ? 0 : 1;
}

}  // namespace

// --------------------------------------------------------------------------
// parsing
// --------------------------------------------------------------------------

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return Rational::from_double_exact(v.get<double>());
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  throw ConfigError("expected a rational (integer, float, or \"p/q\" string)");
}

Box box_from_json(const nlohmann::json& v, const std::string& field_name) {
  if (!v.contains("min") || !v.contains("max"))
    throw ConfigError("box '" + field_name + "' needs min and max arrays");
  Box box{v["min"].get<VecD>(), v["max"].get<VecD>()};
  if (box.lo.size() != box.hi.size())
    throw ConfigError("box '" + field_name + "': min/max length mismatch");
  for (size_t i = 0; i < box.lo.size(); ++i) {
    if (!(box.lo[i] < box.hi[i]))
      throw ConfigError("box '" + field_name + "': min[" + std::to_string(i) +
                        "] must be below max[" + std::to_string(i) + "]");
  }
  return box;
}

HorizontalControl parse_control_spec(const nlohmann::json& spec, int horizontal_dim) {
  if (spec.is_null()) throw ConfigError("missing control spec");
  HorizontalControl control;
  if (!spec.contains("breaks") || !spec.contains("segments"))
    throw ConfigError("control spec needs 'breaks' and 'segments'");
  for (const auto& b : spec["breaks"]) control.h.breaks.push_back(rational_from_json(b));
  for (const auto& seg : spec["segments"]) {
    if (static_cast<int>(seg.size()) != horizontal_dim)
      throw ConfigError("control segment must have one polynomial per horizontal direction");
    std::vector<Poly1Q> polys;
    for (const auto& coeffs : seg) {
      std::vector<Rational> c;
      for (const auto& v : coeffs) c.push_back(rational_from_json(v));
      polys.push_back(Poly1Q(std::move(c)));
    }
    control.h.segments.push_back(std::move(polys));
  }
  if (control.h.breaks.size() != control.h.segments.size() + 1)
    throw ConfigError("control spec: breaks must be one longer than segments");
  for (size_t k = 0; k + 1 < control.h.breaks.size(); ++k)
    if (!(control.h.breaks[k] < control.h.breaks[k + 1]))
      throw ConfigError("control spec: breaks must increase");
  if (!control.h.breaks.front().is_zero()) throw ConfigError("control spec: breaks start at 0");
  return control;
}

CarnotMap parse_map_spec(const nlohmann::json& spec, std::shared_ptr<const CarnotGroup> source) {
  if (spec.is_null()) throw ConfigError("missing map spec");
  std::string kind = spec.value("kind", "");
  if (kind == "identity") return identity_map(source);
  if (kind == "left_translation") {
    VecQ a;
    for (const auto& v : spec.at("a")) a.push_back(rational_from_json(v));
    return left_translation(source, a);
  }
  if (kind == "dilation") return dilation_map(source, rational_from_json(spec.at("r")));
  if (kind == "graded_homomorphism") {
    std::vector<std::vector<Rational>> matrix;
    for (const auto& row : spec.at("matrix")) {
      std::vector<Rational> r;
      for (const auto& v : row) r.push_back(rational_from_json(v));
      matrix.push_back(std::move(r));
    }
    auto target = source;
    if (spec.contains("target")) {
      auto t = make_group(spec["target"].get<std::string>());
      t->set_norm(calibrate_norm(*t, 4000, 0x7a26e7));
      target = t;
    }
    return graded_homomorphism(source, target, matrix);
  }
  if (kind == "heisenberg_shear") {
    std::vector<Rational> coeffs;
    for (const auto& v : spec.at("psi")) coeffs.push_back(rational_from_json(v));
    return heisenberg_shear(source, Poly1Q(std::move(coeffs)));
  }
  if (kind == "composition") {
    const auto& list = spec.at("maps");
    if (list.empty()) throw ConfigError("composition needs maps");
    CarnotMap acc = parse_map_spec(list[0], source);
    for (size_t i = 1; i < list.size(); ++i) {
      CarnotMap next = parse_map_spec(list[i], acc.target);
      acc = compose_maps(next, acc);
    }
    return acc;
  }
  throw ConfigError("unknown map kind: " + kind);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.suite = j.value("suite", "");
  if (cfg.suite.empty()) throw ConfigError("config needs a suite");
  cfg.group = j.value("group", cfg.group);
  if (j.contains("map")) cfg.map_spec = j["map"];
  if (j.contains("control")) cfg.control_spec = j["control"];
  if (j.contains("A")) cfg.a_box = box_from_json(j["A"], "A");
  if (j.contains("Omega")) cfg.omega_box = box_from_json(j["Omega"], "Omega");
  if (j.contains("point")) cfg.point = j["point"].get<VecD>();
  cfg.samples = j.value("samples", cfg.samples);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.t_points = j.value("t_points", cfg.t_points);
  cfg.t_decades = j.value("t_decades", cfg.t_decades);
  cfg.t_cap = j.value("t_cap", cfg.t_cap);
  cfg.xi_count = j.value("xi_count", cfg.xi_count);
  cfg.x_count = j.value("x_count", cfg.x_count);
  cfg.mode = j.value("mode", cfg.mode);
  if (cfg.mode != "exact" && cfg.mode != "float")
    throw ConfigError("mode must be 'exact' or 'float'");
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.timestamp = j.value("timestamp", cfg.timestamp);
  if (cfg.a_box && cfg.omega_box && cfg.a_box->dim() != cfg.omega_box->dim())
    throw ConfigError("A and Omega must have the same dimension");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run(const ExperimentConfig& cfg) {
  Artifacts art{cfg.out_dir, cfg.timestamp};
  if (cfg.suite == "law") return run_law(cfg, art);
  if (cfg.suite == "calibrate") return run_calibrate(cfg, art);
  if (cfg.suite == "metric") return run_metric(cfg, art);
  if (cfg.suite == "lift") return run_lift(cfg, art);
  if (cfg.suite == "ray-error") return run_ray_error(cfg, art);
  if (cfg.suite == "decompose") return run_decompose(cfg, art);
  if (cfg.suite == "constants") return run_constants(cfg, art);
  if (cfg.suite == "pansu-rate") return run_pansu_rate(cfg, art);
  if (cfg.suite == "pansu-trick") return run_pansu_trick(cfg, art);
  if (cfg.suite == "continuity") return run_continuity(cfg, art);
  if (cfg.suite == "validate") return run_algebra_validate(cfg, art);
  throw ConfigError("unknown suite: " + cfg.suite);
}

}  // namespace carnot

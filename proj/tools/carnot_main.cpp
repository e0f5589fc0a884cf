// carnot: experiment runner for Carnot-group calculus in exponential
// coordinates. Subcommands map one-to-one onto the library suites; every
// sampling operation takes an explicit seed so reruns are reproducible.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "carnot/experiments.hpp"

namespace {

carnot::VecD parse_point(const std::string& csv) {
  carnot::VecD out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

carnot::Box parse_box(const std::string& spec, const std::string& name) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw carnot::ConfigError("box '" + name + "' must be 'lo1,lo2,...:hi1,hi2,...'");
  carnot::Box box{parse_point(spec.substr(0, colon)), parse_point(spec.substr(colon + 1))};
  for (size_t i = 0; i < box.lo.size(); ++i) {
    if (box.lo.size() != box.hi.size() || !(box.lo[i] < box.hi[i]))
      throw carnot::ConfigError("box '" + name + "': min must be below max in every coordinate");
  }
  return box;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw carnot::ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw carnot::ConfigError(std::string("parse error in ") + path + ": " + e.what());
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carnot group calculus: group laws, homogeneous metrics, horizontal lifting, "
               "horizontal-word factorization, and Pansu difference-quotient experiments"};
  app.require_subcommand(1);

  carnot::ExperimentConfig cfg;
  if (const char* env_out = std::getenv("CARNOT_OUT_DIR")) cfg.out_dir = env_out;
  std::string map_file, control_file, config_file, a_spec, omega_spec, point_spec;
  bool no_timestamp = false;
  bool law_json = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--samples", cfg.samples, "sampling budget");
    cmd->add_option("--seed", cfg.seed, "PRNG seed");
    cmd->add_option("--out", cfg.out_dir, "artifact directory");
    cmd->add_flag("--no-timestamp", no_timestamp, "suppress the timestamped CSV header line");
  };

  auto* algebra = app.add_subcommand("algebra", "validate or display algebra definitions");
  auto* algebra_validate = algebra->add_subcommand("validate", "check the structure-constant invariants");
  algebra_validate->add_option("file", cfg.group, "algebra JSON file")->required();
  add_common(algebra_validate);
  auto* algebra_show = algebra->add_subcommand("show", "print a catalog algebra");
  algebra_show->add_option("name", cfg.group, "catalog name")->required();

  auto* law = app.add_subcommand("law", "print the BCH group-law polynomials");
  law->add_option("group", cfg.group, "catalog name or algebra file")->required();
  law->add_flag("--json", law_json, "also write law_summary.json (requires --out)");
  add_common(law);

  auto* metric = app.add_subcommand("metric", "homogeneous-norm calibration and metric estimates");
  auto* metric_calibrate = metric->add_subcommand("calibrate", "calibrate the norm weights");
  metric_calibrate->add_option("group", cfg.group)->required();
  add_common(metric_calibrate);
  auto* metric_check = metric->add_subcommand("check", "metric axioms plus comparison estimates");
  metric_check->add_option("group", cfg.group)->required();
  add_common(metric_check);

  auto* lift_cmd = app.add_subcommand("lift", "integrate a horizontal control into a curve");
  lift_cmd->add_option("group", cfg.group)->required();
  lift_cmd->add_option("--control", control_file, "control spec JSON")->required();
  lift_cmd->add_option("--from", point_spec, "start point, comma separated");
  add_common(lift_cmd);

  auto* ray = app.add_subcommand("ray-error", "horizontal-ray approximation rate study");
  ray->add_option("group", cfg.group)->required();
  ray->add_option("--control", control_file, "control spec JSON")->required();
  ray->add_option("--from", point_spec, "start point");
  ray->add_option("--points", cfg.t_points, "grid points");
  ray->add_option("--decades", cfg.t_decades, "grid span in decades");
  add_common(ray);

  auto* decomp = app.add_subcommand("decompose", "factor a point into horizontal letters");
  decomp->add_option("group", cfg.group)->required();
  decomp->add_option("--point", point_spec, "target point, comma separated")->required();
  add_common(decomp);

  auto* constants = app.add_subcommand("constants", "factorization constants k0, C0 and sup |xi|");
  constants->add_option("group", cfg.group)->required();
  add_common(constants);

  auto* pansu = app.add_subcommand("pansu", "Pansu difference-quotient experiments");
  std::string pansu_names[3] = {"rate", "trick", "continuity"};
  for (const auto& name : pansu_names) {
    auto* cmd = pansu->add_subcommand(name);
    cmd->add_option("--group", cfg.group, "source group");
    cmd->add_option("--map", map_file, "map spec JSON")->required();
    cmd->add_option("--A", a_spec, "compact box, 'lo,..:hi,..'")->required();
    cmd->add_option("--Omega", omega_spec, "domain box");
    cmd->add_option("--t-points", cfg.t_points);
    cmd->add_option("--t-decades", cfg.t_decades);
    cmd->add_option("--xi-count", cfg.xi_count);
    cmd->add_option("--x-count", cfg.x_count);
    add_common(cmd);
  }

  auto* run_cmd = app.add_subcommand("run", "run a full experiment config");
  run_cmd->add_option("--config", config_file, "ExperimentConfig JSON")->required();
  run_cmd->add_option("--out", cfg.out_dir, "override artifact directory");
  run_cmd->add_flag("--no-timestamp", no_timestamp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto file_cfg = carnot::load_config(config_file);
      if (!cfg.out_dir.empty()) file_cfg.out_dir = cfg.out_dir;
      if (no_timestamp) file_cfg.timestamp = false;
      return carnot::run(file_cfg);
    }

    cfg.timestamp = !no_timestamp;
    if (!point_spec.empty()) cfg.point = parse_point(point_spec);
    if (!control_file.empty()) cfg.control_spec = load_json(control_file);
    if (!map_file.empty()) cfg.map_spec = load_json(map_file);
    if (!a_spec.empty()) cfg.a_box = parse_box(a_spec, "A");
    if (!omega_spec.empty()) cfg.omega_box = parse_box(omega_spec, "Omega");

    if (algebra_validate->parsed()) cfg.suite = "validate";
    if (algebra_show->parsed()) cfg.suite = "law";
    if (law->parsed()) {
      cfg.suite = "law";
      cfg.print_json = law_json;
    }
    if (metric_calibrate->parsed()) cfg.suite = "calibrate";
    if (metric_check->parsed()) cfg.suite = "metric";
    if (lift_cmd->parsed()) cfg.suite = "lift";
    if (ray->parsed()) cfg.suite = "ray-error";
    if (decomp->parsed()) cfg.suite = "decompose";
    if (constants->parsed()) cfg.suite = "constants";
    if (pansu->parsed()) {
      for (const auto& name : pansu_names)
        if (pansu->get_subcommand(name)->parsed())
          cfg.suite = name == "rate" ? "pansu-rate" : (name == "trick" ? "pansu-trick" : "continuity");
    }
    if (cfg.suite.empty()) {
      std::fprintf(stderr, "no suite selected\n");
      return 2;
    }
    return carnot::run(cfg);
  } catch (const carnot::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}

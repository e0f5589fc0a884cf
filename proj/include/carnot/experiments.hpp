#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "carnot/pansu.hpp"

namespace carnot {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One experiment invocation: a named suite plus everything it needs.
/// Identical configs (same seeds) produce byte-identical data files when
/// the timestamp header is suppressed.
struct ExperimentConfig {
  std::string suite;  // law | metric | lift | ray-error | decompose | constants
                      // | pansu-rate | pansu-trick | continuity
  std::string group = "heisenberg(1)";
  nlohmann::json map_spec;      // pansu suites
  nlohmann::json control_spec;  // lift / ray-error
  std::optional<Box> a_box, omega_box;
  VecD point;          // decompose target / lift start
  long samples = 20000;
  uint64_t seed = 20240801;
  int t_points = 20;
  double t_decades = 4.0;
  double t_cap = 1.0;
  int xi_count = 32;
  int x_count = 3;
  std::string mode = "exact";  // exact | float (future use; studies run exact)
  std::string out_dir;
  bool timestamp = true;
  bool print_json = false;  // law suite: also print the JSON form to stdout
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Builds a map from its JSON spec ("kind" plus parameters) over the
/// given source group.
CarnotMap parse_map_spec(const nlohmann::json& spec, std::shared_ptr<const CarnotGroup> source);

/// Parses a piecewise-polynomial control spec:
/// {"breaks": [...], "segments": [[[coeffs h1], [coeffs h2]], ...]}.
HorizontalControl parse_control_spec(const nlohmann::json& spec, int horizontal_dim);

Rational rational_from_json(const nlohmann::json& v);
Box box_from_json(const nlohmann::json& v, const std::string& field_name);

/// Runs the configured suite; writes CSV + JSON (+ gnuplot .dat) artifacts
/// under out_dir when set. Returns 0 when every invariant check passed,
/// 1 otherwise. Configuration problems throw ConfigError.
int run(const ExperimentConfig& config);

/// Atomic write (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);
std::string format_double(double v);

}  // namespace carnot

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bibc/metrics.hpp"
#include "bibc/scene.hpp"

namespace bibc {

/// Raised for malformed or out-of-contract configuration input; the CLI maps
/// it to its dedicated exit code.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Full experiment description. Defaults are the reference desk-scale setup;
/// an empty config file yields exactly these values. trials/thresholds/
/// bd_y_sweep are optional: when absent each scenario applies its own
/// default budget or grid.
struct ScenarioConfig {
  Scene scene;
  int j_p = 1;
  int tau_p = 16;
  int j_d = 2;
  int tau_d = 16;
  int k = 3;
  double snr_p_db = 5.0;
  double snr_d_db = 2.0;
  ProjectionMode projection_mode = ProjectionMode::Perfect;
  DetectorMode detector_mode = DetectorMode::Full;
  bool normalize_backscatter = false;
  double epsilon = 1e-8;
  int max_iters = 50;
  std::optional<int> trials;
  std::uint64_t seed = 1;
  std::vector<double> theta_grid_deg;  // empty = 1 degree grid over (-90, 90)
  std::vector<double> bd_y_sweep;      // empty = scenario default
  std::vector<double> thresholds;      // log-domain; empty = quantile grid
};

inline std::vector<double> resolved_theta_grid_deg(const ScenarioConfig& cfg) {
  if (!cfg.theta_grid_deg.empty()) return cfg.theta_grid_deg;
  std::vector<double> grid;
  grid.reserve(179);
  for (int d = -89; d <= 89; ++d) grid.push_back(static_cast<double>(d));
  return grid;
}

inline std::string to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::None: return "none";
    case ProjectionMode::Perfect: return "perfect";
    case ProjectionMode::Estimated: return "estimated";
  }
  throw std::logic_error("unreachable projection mode");
}

inline std::string to_string(DetectorMode mode) {
  return mode == DetectorMode::Full ? "full" : "p2only";
}

inline ProjectionMode parse_projection_mode(const std::string& s) {
  if (s == "none") return ProjectionMode::None;
  if (s == "perfect") return ProjectionMode::Perfect;
  if (s == "estimated") return ProjectionMode::Estimated;
  throw ConfigError("projection_mode must be one of none|perfect|estimated, got '" + s + "'");
}

inline DetectorMode parse_detector_mode(const std::string& s) {
  if (s == "full") return DetectorMode::Full;
  if (s == "p2only") return DetectorMode::P2Only;
  throw ConfigError("detector_mode must be one of full|p2only, got '" + s + "'");
}

namespace detail {

inline int get_int(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

inline std::uint64_t get_u64(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline double get_double(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

inline bool get_bool(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<double> get_number_list(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline void validate_config(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.scene.m < 1) fail("m must be >= 1");
  if (cfg.scene.n < 1) fail("n must be >= 1");
  if (!(cfg.scene.lambda > 0.0)) fail("lambda must be > 0");
  if (!(cfg.scene.d_ant > 0.0)) fail("d_ant must be > 0");
  if (!(cfg.scene.g_smc >= 0.0)) fail("g_smc must be >= 0");
  if (cfg.j_p < 1) fail("j_p must be >= 1");
  if (cfg.j_d < 2 || cfg.j_d % 2 != 0) fail("j_d must be even and >= 2");
  if (cfg.tau_p < cfg.scene.n) fail("tau_p must be >= n (pilot rows per slot)");
  if (cfg.tau_d < cfg.scene.m) fail("tau_d must be >= m (probe rows per slot)");
  if (cfg.k < 0) fail("k must be >= 0");
  if (cfg.k >= cfg.scene.m) fail("k must be < m (projection cannot null every direction)");
  if (!std::isfinite(cfg.snr_p_db)) fail("snr_p_db must be finite");
  if (!std::isfinite(cfg.snr_d_db)) fail("snr_d_db must be finite");
  if (!(cfg.epsilon > 0.0)) fail("epsilon must be > 0");
  if (cfg.max_iters < 1) fail("max_iters must be >= 1");
  if (cfg.trials && *cfg.trials < 1) fail("trials must be >= 1");
  for (double y : cfg.bd_y_sweep)
    if (!std::isfinite(y)) fail("bd_y_sweep entries must be finite");
  for (double t : cfg.theta_grid_deg)
    if (!(t > -90.0) || !(t < 90.0)) fail("theta_grid_deg entries must lie in (-90, 90)");
  for (double t : cfg.thresholds)
    if (!std::isfinite(t)) fail("thresholds entries must be finite");
}

/// Parse a flat JSON object into a config. Missing keys keep their defaults,
/// unknown keys are rejected, every provided value is range-checked. An
/// empty or whitespace-only document means "all defaults".
inline ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::string trimmed;
  for (char c : text)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') trimmed += c;
  if (!trimmed.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& item : j.items()) {
      const std::string& key = item.key();
      if (key == "pan_a_x") cfg.scene.pan_a_center.x() = detail::get_double(j, key);
      else if (key == "pan_a_y") cfg.scene.pan_a_center.y() = detail::get_double(j, key);
      else if (key == "pan_b_x") cfg.scene.pan_b_center.x() = detail::get_double(j, key);
      else if (key == "pan_b_y") cfg.scene.pan_b_center.y() = detail::get_double(j, key);
      else if (key == "m") cfg.scene.m = detail::get_int(j, key);
      else if (key == "n") cfg.scene.n = detail::get_int(j, key);
      else if (key == "d_ant") cfg.scene.d_ant = detail::get_double(j, key);
      else if (key == "lambda") cfg.scene.lambda = detail::get_double(j, key);
      else if (key == "bd_x") cfg.scene.bd_position.x() = detail::get_double(j, key);
      else if (key == "bd_y") cfg.scene.bd_position.y() = detail::get_double(j, key);
      else if (key == "reflector_y") cfg.scene.reflector_y = detail::get_double(j, key);
      else if (key == "g_smc") cfg.scene.g_smc = detail::get_double(j, key);
      else if (key == "j_p") cfg.j_p = detail::get_int(j, key);
      else if (key == "tau_p") cfg.tau_p = detail::get_int(j, key);
      else if (key == "j_d") cfg.j_d = detail::get_int(j, key);
      else if (key == "tau_d") cfg.tau_d = detail::get_int(j, key);
      else if (key == "k") cfg.k = detail::get_int(j, key);
      else if (key == "snr_p_db") cfg.snr_p_db = detail::get_double(j, key);
      else if (key == "snr_d_db") cfg.snr_d_db = detail::get_double(j, key);
      else if (key == "projection_mode")
        cfg.projection_mode = parse_projection_mode(detail::get_string(j, key));
      else if (key == "detector_mode")
        cfg.detector_mode = parse_detector_mode(detail::get_string(j, key));
      else if (key == "normalize_backscatter")
        cfg.normalize_backscatter = detail::get_bool(j, key);
      else if (key == "epsilon") cfg.epsilon = detail::get_double(j, key);
      else if (key == "max_iters") cfg.max_iters = detail::get_int(j, key);
      else if (key == "trials") cfg.trials = detail::get_int(j, key);
      else if (key == "seed") cfg.seed = detail::get_u64(j, key);
      else if (key == "theta_grid_deg") cfg.theta_grid_deg = detail::get_number_list(j, key);
      else if (key == "bd_y_sweep") cfg.bd_y_sweep = detail::get_number_list(j, key);
      else if (key == "thresholds") cfg.thresholds = detail::get_number_list(j, key);
      else throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

/// Canonical JSON form of a config: every plain field explicit, optional
/// fields present only when set. Loading the result reproduces the config
/// exactly, including scenario-default resolution behavior.
inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["pan_a_x"] = cfg.scene.pan_a_center.x();
  j["pan_a_y"] = cfg.scene.pan_a_center.y();
  j["pan_b_x"] = cfg.scene.pan_b_center.x();
  j["pan_b_y"] = cfg.scene.pan_b_center.y();
  j["m"] = cfg.scene.m;
  j["n"] = cfg.scene.n;
  j["d_ant"] = cfg.scene.d_ant;
  j["lambda"] = cfg.scene.lambda;
  j["bd_x"] = cfg.scene.bd_position.x();
  j["bd_y"] = cfg.scene.bd_position.y();
  j["reflector_y"] = cfg.scene.reflector_y;
  j["g_smc"] = cfg.scene.g_smc;
  j["j_p"] = cfg.j_p;
  j["tau_p"] = cfg.tau_p;
  j["j_d"] = cfg.j_d;
  j["tau_d"] = cfg.tau_d;
  j["k"] = cfg.k;
  j["snr_p_db"] = cfg.snr_p_db;
  j["snr_d_db"] = cfg.snr_d_db;
  j["projection_mode"] = to_string(cfg.projection_mode);
  j["detector_mode"] = to_string(cfg.detector_mode);
  j["normalize_backscatter"] = cfg.normalize_backscatter;
  j["epsilon"] = cfg.epsilon;
  j["max_iters"] = cfg.max_iters;
  if (cfg.trials) j["trials"] = *cfg.trials;
  j["seed"] = cfg.seed;
  if (!cfg.theta_grid_deg.empty()) j["theta_grid_deg"] = cfg.theta_grid_deg;
  if (!cfg.bd_y_sweep.empty()) j["bd_y_sweep"] = cfg.bd_y_sweep;
  if (!cfg.thresholds.empty()) j["thresholds"] = cfg.thresholds;
  return j;
}

inline std::string config_to_text(const ScenarioConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

}  // namespace bibc

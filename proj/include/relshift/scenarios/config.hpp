#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "relshift/greop/deviation.hpp"
#include "relshift/qkd.hpp"

namespace relshift::scenarios {

inline constexpr int kSchemaVersion = 1;

/// Config rejected; carries the offending field path and, when known, its line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& msg)
      : std::runtime_error(format(field, line, msg)), field_(field), reason_(msg), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& msg) {
    std::string s = "config error";
    if (line > 0) s += " at line " + std::to_string(line);
    if (!field.empty()) s += " in '" + field + "'";
    return s + ": " + msg;
  }
  std::string field_;
  std::string reason_;
  int line_;
};

enum class Engine { Analytic, Gr, Both };
enum class Direction { AToB, BToA };

struct SignalConfig {
  double ratio = 1e10;
  double eta0 = 0.4;
  double wavelength_m = 1550e-9;

  bool operator==(const SignalConfig&) const = default;
};

struct TimeConfig {
  double start = 0.0;
  double stop = 86400.0;
  double step = 60.0;

  bool operator==(const TimeConfig&) const = default;
};

struct DeOverrides {
  std::size_t population = 20;
  double mutation = 0.7;
  double crossover = 0.9;
  std::size_t max_generations = 300;
  double threshold_m = 1e-3;
  bool warm_start = true;
  std::size_t block_size = 32;
  bool refine_transits = false;  // add epochs near the occluder-centre transit in non-LOS gaps
  double transit_step = 0.5;

  bool operator==(const DeOverrides&) const = default;
};

struct ScenarioConfig {
  std::string name;
  Endpoint endpoint_a = KeplerOrbit{};
  Endpoint endpoint_b = KeplerOrbit{};
  Direction direction = Direction::AToB;
  SignalConfig signal;
  TimeConfig time;
  Engine engine = Engine::Analytic;
  CorrectionMode correction = CorrectionMode::Corrected;
  double occlusion_radius_m = PhysConsts{}.R_E;
  std::uint64_t rng_seed = 0;
  DeOverrides de;
  PhysConsts consts;

  bool operator==(const ScenarioConfig&) const = default;

  Link link() const {
    Link l;
    l.emitter = direction == Direction::AToB ? endpoint_a : endpoint_b;
    l.receiver = direction == Direction::AToB ? endpoint_b : endpoint_a;
    l.consts = consts;
    l.occlusion_radius = occlusion_radius_m;
    return l;
  }

  SignalSpec signal_spec() const {
    return SignalSpec::from_ratio(signal.ratio, signal.eta0, 2.0 * std::numbers::pi * consts.c / signal.wavelength_m);
  }

  greop::GrOptions gr_options() const {
    greop::GrOptions o;
    o.threshold = de.threshold_m;
    o.de.population = de.population;
    o.de.mutation = de.mutation;
    o.de.crossover = de.crossover;
    o.de.max_generations = de.max_generations;
    o.warm_start = de.warm_start;
    o.block_size = de.block_size;
    o.seed = rng_seed;
    return o;
  }

  /// Epoch grid start, start + step, ..., including stop when it falls on the grid.
  std::vector<double> epochs() const {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((time.stop - time.start) / time.step * (1.0 + 1e-12)));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(time.start + static_cast<double>(i) * time.step);
    return out;
  }

  void validate() const;
};

namespace detail {

using nlohmann::json;

inline int line_of(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Best-effort line lookup: follows the dotted path through successive key occurrences.
inline int locate(const std::string& text, const std::string& path) {
  if (text.empty() || path.empty()) return 0;
  std::size_t pos = 0;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const std::size_t hit = text.find("\"" + key + "\"", pos);
    if (hit == std::string::npos) return pos == 0 ? 0 : line_of(text, pos);
    pos = hit;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return line_of(text, pos);
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(path, locate(text_, path), msg);
  }

  const json& object(const json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
  }

  void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown key");
  }

  double number(const json& j, const std::string& key, const std::string& path, double fallback) const {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(join(path, key), "expected a finite number");
    return d;
  }

  double required_number(const json& j, const std::string& key, const std::string& path) const {
    if (!j.contains(key)) fail(join(path, key), "missing required field");
    return number(j, key, path, 0.0);
  }

  std::uint64_t unsigned_int(const json& j, const std::string& key, const std::string& path,
                             std::uint64_t fallback) const {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& j, const std::string& key, const std::string& path, bool fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(join(path, key), "expected true or false");
    return j.at(key).get<bool>();
  }

  std::string string(const json& j, const std::string& key, const std::string& path,
                     const std::string& fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) fail(join(path, key), "expected a string");
    return j.at(key).get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  const std::string& text_;
};

inline Endpoint read_endpoint(const Reader& rd, const json& j, const std::string& path) {
  rd.object(j, path);
  const std::string type = rd.string(j, "type", path, "");
  if (type == "orbit") {
    rd.allow_keys(j, path, {"type", "a_m", "ecc", "mean_anomaly0_rad", "argp_rad", "direction"});
    KeplerOrbit o;
    o.a = rd.required_number(j, "a_m", path);
    o.ecc = rd.number(j, "ecc", path, 0.0);
    if (!(o.ecc >= 0.0 && o.ecc < 1.0)) rd.fail(Reader::join(path, "ecc"), "eccentricity must lie in [0, 1)");
    o.M0 = rd.number(j, "mean_anomaly0_rad", path, 0.0);
    o.argp = rd.number(j, "argp_rad", path, 0.0);
    const std::string dir = rd.string(j, "direction", path, "prograde");
    if (dir == "prograde") o.direction = OrbitDirection::Prograde;
    else if (dir == "retrograde") o.direction = OrbitDirection::Retrograde;
    else rd.fail(Reader::join(path, "direction"), "expected 'prograde' or 'retrograde'");
    return o;
  }
  if (type == "ground") {
    rd.allow_keys(j, path, {"type", "radius_m", "phi0_rad"});
    GroundStation g;
    g.radius = rd.number(j, "radius_m", path, g.radius);
    g.phi0 = rd.number(j, "phi0_rad", path, 0.0);
    return g;
  }
  rd.fail(Reader::join(path, "type"), "expected 'orbit' or 'ground'");
}

inline json endpoint_json(const Endpoint& ep) {
  if (const auto* o = std::get_if<KeplerOrbit>(&ep))
    return {{"type", "orbit"},
            {"a_m", o->a},
            {"ecc", o->ecc},
            {"mean_anomaly0_rad", o->M0},
            {"argp_rad", o->argp},
            {"direction", o->direction == OrbitDirection::Prograde ? "prograde" : "retrograde"}};
  const auto& g = std::get<GroundStation>(ep);
  return {{"type", "ground"}, {"radius_m", g.radius}, {"phi0_rad", g.phi0}};
}

}  // namespace detail

inline void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(field, 0, msg); };
  auto check_endpoint = [&](const Endpoint& ep, const std::string& field) {
    try {
      validate_endpoint(ep, consts);
    } catch (const DomainError& e) {
      fail(field, e.what());
    }
  };
  try {
    consts.validate();
  } catch (const DomainError& e) {
    fail("constants", e.what());
  }
  check_endpoint(endpoint_a, "endpoint_a");
  check_endpoint(endpoint_b, "endpoint_b");
  if (!(time.step > 0.0)) fail("time.step_s", "step must be positive");
  if (!(time.stop > time.start)) fail("time.stop_s", "stop must exceed start");
  if (!(signal.ratio > 0.0)) fail("signal.ratio", "ratio must be positive");
  if (!(signal.eta0 > 0.0 && signal.eta0 < 1.0)) fail("signal.eta0", "eta0 must lie in (0, 1)");
  if (!(signal.wavelength_m > 0.0)) fail("signal.wavelength_m", "wavelength must be positive");
  if (!(occlusion_radius_m >= 0.0)) fail("occlusion_radius_m", "radius must be non-negative");
  if (de.population < 4) fail("de.population", "population must hold at least 4 members");
  if (!(de.mutation > 0.0 && de.mutation <= 2.0)) fail("de.mutation", "mutation must lie in (0, 2]");
  if (!(de.crossover >= 0.0 && de.crossover <= 1.0)) fail("de.crossover", "crossover must lie in [0, 1]");
  if (!(de.threshold_m > 0.0)) fail("de.threshold_m", "threshold must be positive");
  if (de.block_size == 0) fail("de.block_size", "block size must be positive");
  if (!(de.transit_step > 0.0)) fail("de.transit_step_s", "transit step must be positive");
}

inline ScenarioConfig parse_config(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", detail::line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  const detail::Reader rd(text);
  rd.object(j, "");
  rd.allow_keys(j, "", {"schema_version", "name", "endpoint_a", "endpoint_b", "link_direction", "signal", "time",
                        "engine", "correction_mode", "occlusion_radius_m", "rng_seed", "de", "constants"});
  if (!j.contains("schema_version")) rd.fail("schema_version", "missing required field");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<long>() != kSchemaVersion)
    rd.fail("schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

  ScenarioConfig cfg;
  cfg.name = rd.string(j, "name", "", "");

  if (j.contains("constants")) {
    const json& c = rd.object(j.at("constants"), "constants");
    rd.allow_keys(c, "constants", {"GM", "c", "R_E", "omega_E"});
    cfg.consts.GM = rd.number(c, "GM", "constants", cfg.consts.GM);
    cfg.consts.c = rd.number(c, "c", "constants", cfg.consts.c);
    cfg.consts.R_E = rd.number(c, "R_E", "constants", cfg.consts.R_E);
    cfg.consts.omega_E = rd.number(c, "omega_E", "constants", cfg.consts.omega_E);
  }
  cfg.occlusion_radius_m = cfg.consts.R_E;

  for (const char* key : {"endpoint_a", "endpoint_b"})
    if (!j.contains(key)) rd.fail(key, "missing required field");
  cfg.endpoint_a = detail::read_endpoint(rd, j.at("endpoint_a"), "endpoint_a");
  cfg.endpoint_b = detail::read_endpoint(rd, j.at("endpoint_b"), "endpoint_b");
  if (auto* g = std::get_if<GroundStation>(&cfg.endpoint_a); g && !j.at("endpoint_a").contains("radius_m"))
    g->radius = cfg.consts.R_E;
  if (auto* g = std::get_if<GroundStation>(&cfg.endpoint_b); g && !j.at("endpoint_b").contains("radius_m"))
    g->radius = cfg.consts.R_E;

  const std::string dir = rd.string(j, "link_direction", "", "a_to_b");
  if (dir == "a_to_b") cfg.direction = Direction::AToB;
  else if (dir == "b_to_a") cfg.direction = Direction::BToA;
  else rd.fail("link_direction", "expected 'a_to_b' or 'b_to_a'");

  if (j.contains("signal")) {
    const json& s = rd.object(j.at("signal"), "signal");
    rd.allow_keys(s, "signal", {"ratio", "eta0", "wavelength_m"});
    cfg.signal.ratio = rd.number(s, "ratio", "signal", cfg.signal.ratio);
    cfg.signal.eta0 = rd.number(s, "eta0", "signal", cfg.signal.eta0);
    cfg.signal.wavelength_m = rd.number(s, "wavelength_m", "signal", cfg.signal.wavelength_m);
  }
  if (!j.contains("time")) rd.fail("time", "missing required field");
  {
    const json& t = rd.object(j.at("time"), "time");
    rd.allow_keys(t, "time", {"start_s", "stop_s", "step_s"});
    cfg.time.start = rd.number(t, "start_s", "time", 0.0);
    cfg.time.stop = rd.required_number(t, "stop_s", "time");
    cfg.time.step = rd.required_number(t, "step_s", "time");
  }

  const std::string engine = rd.string(j, "engine", "", "analytic");
  if (engine == "analytic") cfg.engine = Engine::Analytic;
  else if (engine == "gr") cfg.engine = Engine::Gr;
  else if (engine == "both") cfg.engine = Engine::Both;
  else rd.fail("engine", "expected 'analytic', 'gr' or 'both'");

  const std::string mode = rd.string(j, "correction_mode", "", "corrected");
  if (mode == "corrected") cfg.correction = CorrectionMode::Corrected;
  else if (mode == "uncorrected") cfg.correction = CorrectionMode::Uncorrected;
  else rd.fail("correction_mode", "expected 'corrected' or 'uncorrected'");

  cfg.occlusion_radius_m = rd.number(j, "occlusion_radius_m", "", cfg.occlusion_radius_m);
  cfg.rng_seed = rd.unsigned_int(j, "rng_seed", "", 0);

  if (j.contains("de")) {
    const json& d = rd.object(j.at("de"), "de");
    rd.allow_keys(d, "de", {"population", "mutation", "crossover", "max_generations", "threshold_m", "warm_start",
                            "block_size", "refine_transits", "transit_step_s"});
    cfg.de.population = rd.unsigned_int(d, "population", "de", cfg.de.population);
    cfg.de.mutation = rd.number(d, "mutation", "de", cfg.de.mutation);
    cfg.de.crossover = rd.number(d, "crossover", "de", cfg.de.crossover);
    cfg.de.max_generations = rd.unsigned_int(d, "max_generations", "de", cfg.de.max_generations);
    cfg.de.threshold_m = rd.number(d, "threshold_m", "de", cfg.de.threshold_m);
    cfg.de.warm_start = rd.boolean(d, "warm_start", "de", cfg.de.warm_start);
    cfg.de.block_size = rd.unsigned_int(d, "block_size", "de", cfg.de.block_size);
    cfg.de.refine_transits = rd.boolean(d, "refine_transits", "de", cfg.de.refine_transits);
    cfg.de.transit_step = rd.number(d, "transit_step_s", "de", cfg.de.transit_step);
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), detail::locate(text, e.field()), e.reason());
  }
  return cfg;
}

inline std::string serialize_config(const ScenarioConfig& cfg) {
  using detail::json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = cfg.name;
  j["endpoint_a"] = detail::endpoint_json(cfg.endpoint_a);
  j["endpoint_b"] = detail::endpoint_json(cfg.endpoint_b);
  j["link_direction"] = cfg.direction == Direction::AToB ? "a_to_b" : "b_to_a";
  j["signal"] = {{"ratio", cfg.signal.ratio}, {"eta0", cfg.signal.eta0}, {"wavelength_m", cfg.signal.wavelength_m}};
  j["time"] = {{"start_s", cfg.time.start}, {"stop_s", cfg.time.stop}, {"step_s", cfg.time.step}};
  j["engine"] = cfg.engine == Engine::Analytic ? "analytic" : cfg.engine == Engine::Gr ? "gr" : "both";
  j["correction_mode"] = cfg.correction == CorrectionMode::Corrected ? "corrected" : "uncorrected";
  j["occlusion_radius_m"] = cfg.occlusion_radius_m;
  j["rng_seed"] = cfg.rng_seed;
  j["de"] = {{"population", cfg.de.population},     {"mutation", cfg.de.mutation},
             {"crossover", cfg.de.crossover},       {"max_generations", cfg.de.max_generations},
             {"threshold_m", cfg.de.threshold_m},   {"warm_start", cfg.de.warm_start},
             {"block_size", cfg.de.block_size},     {"refine_transits", cfg.de.refine_transits},
             {"transit_step_s", cfg.de.transit_step}};
  j["constants"] = {{"GM", cfg.consts.GM}, {"c", cfg.consts.c}, {"R_E", cfg.consts.R_E}, {"omega_E", cfg.consts.omega_E}};
  return j.dump(2) + "\n";
}

}  // namespace relshift::scenarios

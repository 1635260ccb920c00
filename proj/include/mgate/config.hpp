#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "metrics.hpp"

namespace mgate {

enum class UnitSystem { GammaUnits, RadPerUs, MHzTimes2Pi };
enum class TimeUnit { InverseGamma, Microseconds };

struct TimeGridSpec {
  double t_max = 0.0;  // us
  int n_samples = 0;
};

struct OutputOptions {
  std::string dir = "out";
  bool svg = false;
};

struct SweepSpec {
  std::vector<std::string> fields;  // every listed field gets the same value
  double start = 0.0;               // in config units
  double stop = 0.0;
  int count = 0;
  bool log_scale = false;
  bool record_at_crossing = true;  // else at record_time
  double record_time = 0.0;        // us
  double unit_factor = 1.0;        // config units -> rad/us
};

struct RunConfig {
  SchemeParams scheme;     // resolved to rad/us
  double gamma_ref = 0.0;  // rad/us value of "1 gamma" (0 when not declared)
  TimeGridSpec time;
  SolverOptions solver;
  McOptions mc;
  OutputOptions output;
  std::optional<SweepSpec> sweep;

  std::vector<double> grid() const { return uniform_grid(time.t_max, time.n_samples); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw config_error(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

// Uniform view over INI-derived (string-valued) and native JSON values.
class ConfigTree {
 public:
  explicit ConfigTree(nlohmann::json root) : root_(std::move(root)) {}

  bool has(const std::string& sec, const std::string& key) const {
    return root_.contains(sec) && root_.at(sec).contains(key);
  }

  bool has_section(const std::string& sec) const { return root_.contains(sec); }

  double number(const std::string& sec, const std::string& key) const {
    const auto& v = root_.at(sec).at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_number(v.get<std::string>(), sec + "." + key);
    throw config_error(sec + "." + key + ": expected a number");
  }

  double number_or(const std::string& sec, const std::string& key, double dflt) const {
    return has(sec, key) ? number(sec, key) : dflt;
  }

  long long integer(const std::string& sec, const std::string& key) const {
    const double v = number(sec, key);
    const long long i = static_cast<long long>(std::llround(v));
    if (double(i) != v) throw config_error(sec + "." + key + ": expected an integer");
    return i;
  }

  bool boolean(const std::string& sec, const std::string& key, bool dflt) const {
    if (!has(sec, key)) return dflt;
    const auto& v = root_.at(sec).at(key);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    if (v.is_string()) {
      const std::string s = trim(v.get<std::string>());
      if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
      if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    }
    throw config_error(sec + "." + key + ": expected a boolean");
  }

  std::string text(const std::string& sec, const std::string& key) const {
    const auto& v = root_.at(sec).at(key);
    if (v.is_string()) return trim(v.get<std::string>());
    throw config_error(sec + "." + key + ": expected a string");
  }

  std::string text_or(const std::string& sec, const std::string& key,
                      const std::string& dflt) const {
    return has(sec, key) ? text(sec, key) : dflt;
  }

  // Reject unknown sections and keys so typos cannot silently fall back to
  // defaults.
  void enforce_schema(
      const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [sec, body] : root_.items()) {
      const auto it = schema.find(sec);
      if (it == schema.end()) throw config_error("unknown section [" + sec + "]");
      if (!body.is_object()) throw config_error("section [" + sec + "] must hold keys");
      for (const auto& [key, value] : body.items()) {
        (void)value;
        if (!it->second.count(key)) {
          throw config_error("unknown key '" + key + "' in section [" + sec + "]");
        }
      }
    }
  }

 private:
  nlohmann::json root_;
};

inline ConfigTree parse_ini(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw config_error("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) {
        throw config_error("line " + std::to_string(lineno) + ": empty section name");
      }
      if (!root.contains(section)) root[section] = nlohmann::json::object();
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw config_error("line " + std::to_string(lineno) + ": empty key");
    }
    root[section][key] = value;
  }
  return ConfigTree(std::move(root));
}

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"scheme",
       {"units", "gamma_MHz", "delta1", "delta2", "delta3", "delta4", "omega1",
        "omega4", "G_p", "G_t", "gamma_all", "gamma_12", "gamma_32", "gamma_52",
        "gamma_14", "gamma_34", "gamma_54"}},
      {"time", {"t_max", "n_samples", "units"}},
      {"solver", {"method", "rtol", "atol", "max_step"}},
      {"mc", {"n_samples", "seed"}},
      {"output", {"dir", "svg"}},
      {"sweep", {"field", "start", "stop", "count", "scale", "record"}},
  };
  return schema;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    const std::string item = trim(cur);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Fields a sweep may vary (all in the same units as the [scheme] section).
inline const std::set<std::string>& sweepable_fields() {
  static const std::set<std::string> fields = {
      "delta1", "delta2", "delta3",  "delta4",   "omega1",
      "omega4", "G_p",    "G_t",     "gamma_all"};
  return fields;
}

inline RunConfig resolve_config(const detail::ConfigTree& tree) {
  tree.enforce_schema(detail::config_schema());
  if (!tree.has_section("scheme")) throw config_error("missing [scheme] section");
  if (!tree.has("scheme", "units")) throw config_error("scheme.units is required");

  const std::string units_name = tree.text("scheme", "units");
  UnitSystem units;
  if (units_name == "gamma_units") {
    units = UnitSystem::GammaUnits;
  } else if (units_name == "rad_per_us") {
    units = UnitSystem::RadPerUs;
  } else if (units_name == "MHz_times_2pi") {
    units = UnitSystem::MHzTimes2Pi;
  } else {
    throw config_error("scheme.units must be gamma_units, rad_per_us or MHz_times_2pi");
  }

  RunConfig cfg;
  if (tree.has("scheme", "gamma_MHz")) {
    const double gamma_mhz = tree.number("scheme", "gamma_MHz");
    if (!(gamma_mhz > 0.0)) throw config_error("scheme.gamma_MHz must be > 0");
    cfg.gamma_ref = 2.0 * M_PI * gamma_mhz;
  }
  if (units == UnitSystem::GammaUnits && cfg.gamma_ref == 0.0) {
    throw config_error("scheme.units = gamma_units requires scheme.gamma_MHz");
  }
  const double factor = units == UnitSystem::GammaUnits ? cfg.gamma_ref
                        : units == UnitSystem::MHzTimes2Pi ? 2.0 * M_PI
                                                           : 1.0;

  auto scheme_value = [&](const char* key) {
    if (!tree.has("scheme", key)) {
      throw config_error(std::string("scheme.") + key + " is required");
    }
    return factor * tree.number("scheme", key);
  };
  cfg.scheme.delta1 = scheme_value("delta1");
  cfg.scheme.delta2 = scheme_value("delta2");
  cfg.scheme.delta3 = scheme_value("delta3");
  cfg.scheme.delta4 = scheme_value("delta4");
  cfg.scheme.omega1 = scheme_value("omega1");
  cfg.scheme.omega4 = scheme_value("omega4");
  cfg.scheme.g_probe = scheme_value("G_p");
  cfg.scheme.g_trigger = scheme_value("G_t");

  if (tree.has("scheme", "gamma_all")) {
    cfg.scheme.gamma = DecayTable::uniform(factor * tree.number("scheme", "gamma_all"));
  }
  const std::pair<const char*, std::pair<int, int>> overrides[] = {
      {"gamma_12", {1, 2}}, {"gamma_32", {3, 2}}, {"gamma_52", {5, 2}},
      {"gamma_14", {1, 4}}, {"gamma_34", {3, 4}}, {"gamma_54", {5, 4}},
  };
  for (const auto& [key, kl] : overrides) {
    if (tree.has("scheme", key)) {
      cfg.scheme.gamma(kl.first, kl.second) = factor * tree.number("scheme", key);
    }
  }
  try {
    cfg.scheme.validate();
  } catch (const params_error& e) {
    throw config_error(std::string("scheme: ") + e.what());
  }

  // --- time grid ---
  if (!tree.has_section("time")) throw config_error("missing [time] section");
  TimeUnit time_unit = units == UnitSystem::GammaUnits ? TimeUnit::InverseGamma
                                                       : TimeUnit::Microseconds;
  if (tree.has("time", "units")) {
    const std::string tu = tree.text("time", "units");
    if (tu == "inv_gamma") {
      time_unit = TimeUnit::InverseGamma;
    } else if (tu == "us") {
      time_unit = TimeUnit::Microseconds;
    } else {
      throw config_error("time.units must be inv_gamma or us");
    }
  }
  auto to_us = [&](double value, const std::string& where) {
    if (time_unit == TimeUnit::Microseconds) return value;
    if (cfg.gamma_ref <= 0.0) {
      throw config_error(where + ": time in units of 1/gamma requires scheme.gamma_MHz");
    }
    return value / cfg.gamma_ref;
  };
  if (!tree.has("time", "t_max")) throw config_error("time.t_max is required");
  if (!tree.has("time", "n_samples")) throw config_error("time.n_samples is required");
  cfg.time.t_max = to_us(tree.number("time", "t_max"), "time.t_max");
  cfg.time.n_samples = static_cast<int>(tree.integer("time", "n_samples"));
  if (!(cfg.time.t_max > 0.0)) throw config_error("time.t_max must be > 0");
  if (cfg.time.n_samples < 2) throw config_error("time.n_samples must be >= 2");

  // --- solver ---
  if (tree.has("solver", "method")) {
    const std::string m = tree.text("solver", "method");
    if (m == "adaptive-rk") {
      cfg.solver.method = SolveMethod::AdaptiveRk;
    } else if (m == "matrix-exponential") {
      cfg.solver.method = SolveMethod::MatrixExponential;
    } else {
      throw config_error("solver.method must be adaptive-rk or matrix-exponential");
    }
  }
  cfg.solver.rtol = tree.number_or("solver", "rtol", cfg.solver.rtol);
  cfg.solver.atol = tree.number_or("solver", "atol", cfg.solver.atol);
  cfg.solver.max_step = tree.number_or("solver", "max_step", cfg.solver.max_step);
  try {
    cfg.solver.validate();
  } catch (const params_error& e) {
    throw config_error(std::string("solver: ") + e.what());
  }

  // --- monte carlo ---
  cfg.mc.n_samples = static_cast<int>(
      tree.has("mc", "n_samples") ? tree.integer("mc", "n_samples") : cfg.mc.n_samples);
  if (tree.has("mc", "seed")) {
    const long long seed = tree.integer("mc", "seed");
    if (seed < 0) throw config_error("mc.seed must be >= 0");
    cfg.mc.seed = static_cast<std::uint64_t>(seed);
  }
  try {
    cfg.mc.validate();
  } catch (const params_error& e) {
    throw config_error(std::string("mc: ") + e.what());
  }

  // --- output ---
  cfg.output.dir = tree.text_or("output", "dir", cfg.output.dir);
  cfg.output.svg = tree.boolean("output", "svg", cfg.output.svg);

  // --- sweep ---
  if (tree.has_section("sweep")) {
    SweepSpec sw;
    sw.unit_factor = factor;
    if (!tree.has("sweep", "field")) throw config_error("sweep.field is required");
    sw.fields = detail::split_list(tree.text("sweep", "field"));
    if (sw.fields.empty()) throw config_error("sweep.field lists no fields");
    for (const std::string& f : sw.fields) {
      if (!sweepable_fields().count(f)) {
        throw config_error("sweep.field: '" + f + "' is not sweepable");
      }
    }
    if (!tree.has("sweep", "start") || !tree.has("sweep", "stop") ||
        !tree.has("sweep", "count")) {
      throw config_error("sweep needs start, stop and count");
    }
    sw.start = tree.number("sweep", "start");
    sw.stop = tree.number("sweep", "stop");
    sw.count = static_cast<int>(tree.integer("sweep", "count"));
    if (sw.count < 1) throw config_error("sweep.count must be >= 1");
    const std::string scale = tree.text_or("sweep", "scale", "linear");
    if (scale == "log") {
      sw.log_scale = true;
      if (!(sw.start > 0.0) || !(sw.stop > 0.0)) {
        throw config_error("log-scale sweep needs positive start and stop");
      }
    } else if (scale != "linear") {
      throw config_error("sweep.scale must be linear or log");
    }
    const std::string record = tree.text_or("sweep", "record", "cps-crossing-pi");
    if (record == "cps-crossing-pi") {
      sw.record_at_crossing = true;
    } else if (record.rfind("t=", 0) == 0) {
      sw.record_at_crossing = false;
      sw.record_time = to_us(detail::parse_number(record.substr(2), "sweep.record"),
                             "sweep.record");
      if (!(sw.record_time >= 0.0) || sw.record_time > cfg.time.t_max) {
        throw config_error("sweep.record time must lie inside the time grid");
      }
    } else {
      throw config_error("sweep.record must be cps-crossing-pi or t=<value>");
    }
    cfg.sweep = sw;
  }
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text, bool json_format) {
  if (json_format) {
    nlohmann::json root;
    try {
      root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw config_error(std::string("JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw config_error("top-level JSON must be an object");
    return resolve_config(detail::ConfigTree(std::move(root)));
  }
  return resolve_config(detail::parse_ini(text));
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  bool json_format = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (!json_format) {
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      json_format = (ch == '{');
      break;
    }
  }
  return parse_config_text(text, json_format);
}

}  // namespace mgate

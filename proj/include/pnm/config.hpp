// Copyright 2026 The pnmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON analysis configuration.
//
//   {
//     "evolution": {"preset": "paper-example"}
//               | {"preset": "quasi-eternal", "alpha": 0.1, "t0": 4.0}
//               | {"type": "depolarizing", "dim": 2, "f": "exp(-t)"}
//               | {"type": "pauliProbs", "px": "...", "py": "...", "pz": "..."}
//               | {"type": "pauliRates", "gx": "...", "gy": "...", "gz": "..."}
//               | {"type": "quasiEternal", "alpha": 1, "t0": 0, "tU": 0},
//     "horizon": 5.0,
//     "grid_points": 400,
//     "tolerances": {"cptp": 1e-9, "bisection": 1e-9},
//     "outputs": ["report", "grid", "flux"],
//     "seed": 1
//   }

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pnm/analysis.hpp"
#include "pnm/errors.hpp"
#include "pnm/evolutions.hpp"
#include "pnm/expr.hpp"

namespace pnm {

using Json = nlohmann::ordered_json;

struct AnalysisConfig {
  EvolutionSpec evolution;
  /// The evolution object as written, for the report echo.
  Json evolution_source;
  double horizon = 5.0;
  int grid_points = 400;
  double cptp_tol = 1e-9;
  double bisection_tol = 1e-9;
  std::vector<std::string> outputs{"report"};
  std::uint64_t seed = 1;
  /// Unknown fields seen in lenient mode.
  std::vector<std::string> warnings;

  AnalysisOptions options() const {
    AnalysisOptions o;
    o.grid_points = grid_points;
    o.cptp_tol = cptp_tol;
    o.bisect_tol = bisection_tol;
    return o;
  }

  /// Normalized configuration with every default filled in.
  Json echo() const {
    Json j;
    j["evolution"] = evolution_source;
    j["horizon"] = horizon;
    j["grid_points"] = grid_points;
    j["tolerances"] = {{"cptp", cptp_tol}, {"bisection", bisection_tol}};
    j["outputs"] = outputs;
    j["seed"] = seed;
    return j;
  }
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(bool strict) : strict_(strict) {}

  std::vector<std::string> warnings;

  void check_keys(const Json& obj, const std::string& ptr,
                  std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (auto a : allowed) known = known || it.key() == a;
      if (known) continue;
      const std::string where = ptr + "/" + it.key();
      if (strict_) throw SchemaError(where, "unknown field");
      warnings.push_back(where + ": unknown field ignored");
    }
  }

  static const Json& object_at(const Json& parent, const std::string& key, const std::string& ptr) {
    if (!parent.contains(key)) throw SchemaError(ptr + "/" + key, "missing field");
    const Json& v = parent.at(key);
    if (!v.is_object()) throw SchemaError(ptr + "/" + key, "expected an object");
    return v;
  }

  static double number(const Json& obj, const std::string& key, const std::string& ptr,
                       std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      throw SchemaError(ptr + "/" + key, "missing field");
    }
    const Json& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(ptr + "/" + key, "expected a number");
    return v.get<double>();
  }

  static std::optional<double> maybe_number(const Json& obj, const std::string& key,
                                            const std::string& ptr) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, ptr);
  }

  static ScalarFn function(const Json& obj, const std::string& key, const std::string& ptr) {
    const std::string where = ptr + "/" + key;
    if (!obj.contains(key)) throw SchemaError(where, "missing field");
    const Json& v = obj.at(key);
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_number()) {
      return ScalarFn::constant(v.get<double>());
    } else {
      throw SchemaError(where, "expected an expression string");
    }
    try {
      return ScalarFn::parse(text);
    } catch (const ExprError& e) {
      throw ConfigExprError(where, e.what());
    }
  }

  EvolutionSpec evolution(const Json& ev) {
    const std::string ptr = "/evolution";
    if (ev.contains("preset")) {
      check_keys(ev, ptr, {"preset", "alpha", "t0", "tU"});
      if (!ev.at("preset").is_string()) throw SchemaError(ptr + "/preset", "expected a string");
      const std::string name = ev.at("preset").get<std::string>();
      bool known = false;
      for (const auto& p : catalog()) known = known || p.name == name;
      if (!known) throw SchemaError(ptr + "/preset", "unknown preset '" + name + "'");
      PresetParams params{maybe_number(ev, "alpha", ptr), maybe_number(ev, "t0", ptr),
                          maybe_number(ev, "tU", ptr)};
      if (params.alpha && !(*params.alpha > 0.0)) throw SchemaError(ptr + "/alpha", "must be positive");
      EvolutionSpec spec = preset_spec(name, params);
      check_quasi_eternal(spec, ptr);
      return spec;
    }
    if (!ev.contains("type")) throw SchemaError(ptr, "needs either 'preset' or 'type'");
    if (!ev.at("type").is_string()) throw SchemaError(ptr + "/type", "expected a string");
    const std::string type = ev.at("type").get<std::string>();
    if (type == "depolarizing") {
      check_keys(ev, ptr, {"type", "dim", "f"});
      const double dim = number(ev, "dim", ptr, 2.0);
      if (dim != std::floor(dim) || dim < 2 || dim > 8) {
        throw SchemaError(ptr + "/dim", "dimension must be an integer in [2, 8]");
      }
      return DepolarizingSpec{static_cast<int>(dim), function(ev, "f", ptr)};
    }
    if (type == "pauliProbs") {
      check_keys(ev, ptr, {"type", "px", "py", "pz"});
      return PauliProbsSpec{function(ev, "px", ptr), function(ev, "py", ptr), function(ev, "pz", ptr)};
    }
    if (type == "pauliRates") {
      check_keys(ev, ptr, {"type", "gx", "gy", "gz"});
      return PauliRatesSpec{function(ev, "gx", ptr), function(ev, "gy", ptr), function(ev, "gz", ptr)};
    }
    if (type == "quasiEternal") {
      check_keys(ev, ptr, {"type", "alpha", "t0", "tU"});
      const double alpha = number(ev, "alpha", ptr);
      if (!(alpha > 0.0)) throw SchemaError(ptr + "/alpha", "must be positive");
      const double tu = number(ev, "tU", ptr, 0.0);
      if (tu < 0.0) throw SchemaError(ptr + "/tU", "must be non-negative");
      EvolutionSpec spec = QuasiEternalSpec{alpha, number(ev, "t0", ptr, t0_alpha(alpha)), tu};
      check_quasi_eternal(spec, ptr);
      return spec;
    }
    throw SchemaError(ptr + "/type", "unknown evolution type '" + type + "'");
  }

 private:
  static void check_quasi_eternal(const EvolutionSpec& spec, const std::string& ptr) {
    const auto* q = std::get_if<QuasiEternalSpec>(&spec);
    if (!q) return;
    const double floor = t0_alpha(q->alpha);
    if (q->t0 < floor - 1e-12) {
      throw SchemaError(ptr + "/t0", "t0 = " + format_number(q->t0) +
                                         " is below t0_alpha = " + format_number(floor) +
                                         "; the dynamical maps would not be CPTP");
    }
  }

  bool strict_;
};

}  // namespace detail

/// Parses and validates a configuration document.
inline AnalysisConfig load_config_json(const Json& doc, bool strict = true) {
  if (!doc.is_object()) throw SchemaError("", "configuration must be a JSON object");
  detail::ConfigReader rd(strict);
  rd.check_keys(doc, "", {"evolution", "horizon", "grid_points", "tolerances", "outputs", "seed"});

  AnalysisConfig cfg;
  const Json& ev = detail::ConfigReader::object_at(doc, "evolution", "");
  cfg.evolution = rd.evolution(ev);
  cfg.evolution_source = ev;

  cfg.horizon = detail::ConfigReader::number(doc, "horizon", "", 5.0);
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw SchemaError("/horizon", "must be positive and finite");
  }
  if (doc.contains("grid_points")) {
    const Json& g = doc.at("grid_points");
    if (!g.is_number_integer()) throw SchemaError("/grid_points", "expected an integer");
    cfg.grid_points = g.get<int>();
  }
  if (cfg.grid_points < 16) throw SchemaError("/grid_points", "must be at least 16");

  if (doc.contains("tolerances")) {
    const Json& tol = doc.at("tolerances");
    if (!tol.is_object()) throw SchemaError("/tolerances", "expected an object");
    rd.check_keys(tol, "/tolerances", {"cptp", "bisection"});
    cfg.cptp_tol = detail::ConfigReader::number(tol, "cptp", "/tolerances", cfg.cptp_tol);
    cfg.bisection_tol = detail::ConfigReader::number(tol, "bisection", "/tolerances", cfg.bisection_tol);
    if (!(cfg.cptp_tol > 0.0)) throw SchemaError("/tolerances/cptp", "must be positive");
    if (!(cfg.bisection_tol > 0.0)) throw SchemaError("/tolerances/bisection", "must be positive");
  }

  if (doc.contains("outputs")) {
    const Json& out = doc.at("outputs");
    if (!out.is_array()) throw SchemaError("/outputs", "expected an array");
    cfg.outputs.clear();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::string where = "/outputs/" + std::to_string(i);
      if (!out[i].is_string()) throw SchemaError(where, "expected a string");
      const std::string o = out[i].get<std::string>();
      if (o != "report" && o != "grid" && o != "flux") throw SchemaError(where, "unknown output '" + o + "'");
      cfg.outputs.push_back(o);
    }
  }

  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw SchemaError("/seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  const ValidationReport rep = validate_spec(cfg.evolution, cfg.horizon, cfg.grid_points);
  if (!rep.valid) {
    std::string msg = "invalid evolution:";
    for (const auto& i : rep.issues) msg += " " + i + ";";
    throw SchemaError("/evolution", msg);
  }
  cfg.warnings = std::move(rd.warnings);
  return cfg;
}

inline AnalysisConfig load_config_text(std::string_view text, bool strict = true) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return load_config_json(doc, strict);
}

inline AnalysisConfig load_config_file(const std::string& path, bool strict = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), strict);
}

}  // namespace pnm

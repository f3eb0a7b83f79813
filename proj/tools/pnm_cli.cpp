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

// pnm: command-line front end.
//
//   pnm analyze  --config cfg.json [--out report.json]
//   pnm scan     --config cfg.json --format csv --out grid.csv
//   pnm core | measures | eb --config cfg.json
//   pnm catalog
//
// Exit codes: 0 ok, 1 configuration error, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pnm/pnm.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<double> horizon;
  std::optional<int> grid;
  std::string out;
  std::string format = "json";
  bool strict = false;
};

pnm::AnalysisConfig load(const Options& o) {
  std::string text;
  if (o.config == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) throw pnm::ConfigError("cannot open config file '" + o.config + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  pnm::Json doc;
  try {
    doc = pnm::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw pnm::ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object()) {
    if (o.horizon) doc["horizon"] = *o.horizon;
    if (o.grid) doc["grid_points"] = *o.grid;
  }
  auto cfg = pnm::load_config_json(doc, o.strict);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const Options& o, Fn&& write) {
  if (o.out.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw pnm::ConfigError("cannot open output file '" + o.out + "'");
  write(f);
}

void write_json(const Options& o, const pnm::Json& j) {
  emit(o, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

int run_analyze(const Options& o) {
  const auto cfg = load(o);
  const auto doc = pnm::run_report(cfg);
  emit(o, [&](std::ostream& os) { os << doc.dump(); });
  return 0;
}

int run_scan(const Options& o) {
  const auto cfg = load(o);
  const pnm::Evolution e(cfg.evolution, cfg.horizon);
  const auto g = pnm::scan_regions(e, cfg.horizon, cfg.grid_points, cfg.cptp_tol);
  if (o.format == "csv") {
    emit(o, [&](std::ostream& os) { pnm::export_grid_csv(g, os); });
  } else {
    write_json(o, pnm::export_grid_json(g));
  }
  return 0;
}

int run_core(const Options& o) {
  const auto cfg = load(o);
  pnm::ReportSections s;
  s.grid = false;
  s.measures = false;
  const auto doc = pnm::run_report(cfg, s);
  pnm::Json j = doc.to_json();
  write_json(o, pnm::Json{{"times", j["times"]}, {"core", j["core"]}, {"notes", j["notes"]}});
  return 0;
}

int run_measures(const Options& o) {
  const auto cfg = load(o);
  pnm::ReportSections s;
  s.grid = false;
  const auto doc = pnm::run_report(cfg, s);
  pnm::Json j = doc.to_json();
  if (o.format == "csv") {
    const pnm::Evolution e(cfg.evolution, cfg.horizon);
    const auto fs = pnm::flux_series(e, pnm::default_pair(e), cfg.horizon, cfg.grid_points);
    emit(o, [&](std::ostream& os) { pnm::export_flux_csv(fs, os); });
    return 0;
  }
  write_json(o, pnm::Json{{"times", j["times"]}, {"measures", j["measures"]}, {"notes", j["notes"]}});
  return 0;
}

int run_eb(const Options& o) {
  const auto cfg = load(o);
  const pnm::Evolution e(cfg.evolution, cfg.horizon);
  const auto eb = pnm::eb_time_qubit(e, cfg.horizon, cfg.grid_points);
  write_json(o, pnm::Json{{"eb_time", eb.time ? pnm::Json(*eb.time) : pnm::Json(nullptr)},
                          {"horizon", cfg.horizon},
                          {"horizon_limited", eb.horizon_limited}});
  return 0;
}

int run_catalog(const Options& o) {
  pnm::Json list = pnm::Json::array();
  for (const auto& p : pnm::catalog()) list.push_back({{"name", p.name}, {"description", p.description}});
  if (o.format == "csv") {
    emit(o, [&](std::ostream& os) {
      for (const auto& p : pnm::catalog()) os << p.name << "\t" << p.description << "\n";
    });
    return 0;
  }
  write_json(o, list);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovianity analysis of one-parameter families of quantum dynamical maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pnm::kToolVersion));
  Options o;

  auto add_common = [&o](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON configuration ('-' for stdin)");
    if (needs_config) c->required();
    sub->add_option("--horizon", o.horizon, "override the analysis horizon");
    sub->add_option("--grid", o.grid, "override the number of grid points");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--strict", o.strict, "reject unknown configuration fields");
  };

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
    bool needs_config;
  };
  const Cmd cmds[] = {
      {"analyze", "full report: validation, grid, times, core, measures", run_analyze, true},
      {"scan", "CPTP region grid (json or csv)", run_scan, true},
      {"core", "characteristic times of the PNM core", run_core, true},
      {"measures", "non-Markovianity measures (csv: flux series)", run_measures, true},
      {"catalog", "list preset evolutions", run_catalog, false},
      {"eb", "entanglement-breaking onset of a qubit evolution", run_eb, true},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, c.needs_config);
    subs.emplace_back(sub, c.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(o);
    }
  } catch (const pnm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pnm::ExprError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pnm::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

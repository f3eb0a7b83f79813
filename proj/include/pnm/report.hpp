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

// Full analysis pipeline and its serialized forms. Infinite times are written
// as null together with a horizon_limited flag.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnm/analysis.hpp"
#include "pnm/config.hpp"
#include "pnm/evolutions.hpp"
#include "pnm/measures.hpp"

namespace pnm {

inline constexpr const char* kToolName = "pnmkit";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportTimes {
  std::optional<double> T, tau, t_star;
  bool T_horizon_limited = false;
  bool tau_horizon_limited = false;
  bool t_star_horizon_limited = false;
  std::string classification;

  static ReportTimes from(const CharTimes& ct) {
    ReportTimes r;
    auto put = [](const CharTime& c, std::optional<double>& v, bool& hl) {
      if (c.finite()) v = c.value;
      hl = c.horizon_limited;
    };
    put(ct.T, r.T, r.T_horizon_limited);
    put(ct.tau, r.tau, r.tau_horizon_limited);
    put(ct.t_star, r.t_star, r.t_star_horizon_limited);
    r.classification = classification_name(ct.classification);
    return r;
  }
};

struct ReportValidation {
  bool valid = true;
  bool initial_identity = true;
  std::optional<double> non_bijective_time;
  double min_dynamical_choi = 0.0;
  std::vector<std::string> issues;
};

struct ReportGrid {
  int n = 0;
  double horizon = 0.0;
  double min_value = 0.0;
  double min_s = 0.0;
  double min_t = 0.0;
  std::size_t cptp = 0, non_cptp = 0, undefined = 0;
  std::size_t composition_checked = 0;
  std::size_t composition_violations = 0;
  std::size_t non_cptp_pairs_composing_to_cptp = 0;
};

struct ReportFlux {
  double M_W = 0.0, M_W_max = 0.0, M_W_av = 0.0;
};

struct ReportRhp {
  std::optional<double> value;  // null when divergent
  bool divergent = false;
  bool converged = true;
};

struct ReportMeasures {
  std::string pair;
  std::optional<double> delta, f_at_T, M_D, M_D_core, M_mix, M_mix_core;
  ReportFlux flux;
  std::optional<ReportFlux> flux_core;
  ReportRhp rhp;
  std::optional<ReportRhp> rhp_core;
  std::optional<double> amplification;
  std::optional<double> eb_time;
  bool eb_horizon_limited = true;
  bool lower_bounds = true;
};

struct ReportCore {
  double shift = 0.0;
  std::string description;
  /// Times measured on the extracted core.
  ReportTimes computed;
  /// (0, tau - T, t* - T) from the parent's times.
  ReportTimes from_parent;
  std::optional<double> delta;
};

struct ReportDocument {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::uint64_t seed = 1;
  Json config;
  std::string family;
  ReportValidation validation;
  ReportTimes times;
  std::optional<double> T_divisible;
  std::optional<ReportGrid> grid;
  std::optional<ReportCore> core;
  std::optional<ReportMeasures> measures;
  std::vector<std::string> notes;

  Json to_json() const;
  static ReportDocument from_json(const Json& j);
  std::string dump() const { return to_json().dump(2) + "\n"; }
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline std::optional<double> opt_double(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

inline Json times_json(const ReportTimes& t) {
  Json j;
  j["T"] = opt_json(t.T);
  j["tau"] = opt_json(t.tau);
  j["t_star"] = opt_json(t.t_star);
  j["T_horizon_limited"] = t.T_horizon_limited;
  j["tau_horizon_limited"] = t.tau_horizon_limited;
  j["t_star_horizon_limited"] = t.t_star_horizon_limited;
  j["classification"] = t.classification;
  return j;
}

inline ReportTimes times_from(const Json& j) {
  ReportTimes t;
  t.T = opt_double(j, "T");
  t.tau = opt_double(j, "tau");
  t.t_star = opt_double(j, "t_star");
  t.T_horizon_limited = j.at("T_horizon_limited").get<bool>();
  t.tau_horizon_limited = j.at("tau_horizon_limited").get<bool>();
  t.t_star_horizon_limited = j.at("t_star_horizon_limited").get<bool>();
  t.classification = j.at("classification").get<std::string>();
  return t;
}

inline Json flux_json(const ReportFlux& f) {
  return Json{{"M_W", f.M_W}, {"M_W_max", f.M_W_max}, {"M_W_av", f.M_W_av}};
}

inline ReportFlux flux_from(const Json& j) {
  return {j.at("M_W").get<double>(), j.at("M_W_max").get<double>(), j.at("M_W_av").get<double>()};
}

inline Json rhp_json(const ReportRhp& r) {
  return Json{{"value", opt_json(r.value)}, {"divergent", r.divergent}, {"converged", r.converged}};
}

inline ReportRhp rhp_from(const Json& j) {
  return {opt_double(j, "value"), j.at("divergent").get<bool>(), j.at("converged").get<bool>()};
}

}  // namespace detail

inline Json ReportDocument::to_json() const {
  using namespace detail;
  Json j;
  j["tool"] = {{"name", tool}, {"version", version}};
  j["seed"] = seed;
  j["config"] = config;
  j["family"] = family;
  j["validation"] = {{"valid", validation.valid},
                     {"initial_identity", validation.initial_identity},
                     {"non_bijective_time", opt_json(validation.non_bijective_time)},
                     {"min_dynamical_choi", validation.min_dynamical_choi},
                     {"issues", validation.issues}};
  j["times"] = times_json(times);
  j["T_divisible"] = opt_json(T_divisible);
  if (grid) {
    const auto& g = *grid;
    j["grid"] = {{"n", g.n},
                 {"horizon", g.horizon},
                 {"min_value", g.min_value},
                 {"min_s", g.min_s},
                 {"min_t", g.min_t},
                 {"cptp", g.cptp},
                 {"non_cptp", g.non_cptp},
                 {"undefined", g.undefined},
                 {"composition_checked", g.composition_checked},
                 {"composition_violations", g.composition_violations},
                 {"non_cptp_pairs_composing_to_cptp", g.non_cptp_pairs_composing_to_cptp}};
  } else {
    j["grid"] = nullptr;
  }
  if (core) {
    j["core"] = {{"shift", core->shift},
                 {"description", core->description},
                 {"computed", times_json(core->computed)},
                 {"from_parent", times_json(core->from_parent)},
                 {"delta", opt_json(core->delta)}};
  } else {
    j["core"] = nullptr;
  }
  if (measures) {
    const auto& m = *measures;
    Json mj;
    mj["pair"] = m.pair;
    mj["delta"] = opt_json(m.delta);
    mj["f_at_T"] = opt_json(m.f_at_T);
    mj["M_D"] = opt_json(m.M_D);
    mj["M_D_core"] = opt_json(m.M_D_core);
    mj["M_mix"] = opt_json(m.M_mix);
    mj["M_mix_core"] = opt_json(m.M_mix_core);
    mj["flux"] = flux_json(m.flux);
    mj["flux_core"] = m.flux_core ? flux_json(*m.flux_core) : Json(nullptr);
    mj["rhp"] = rhp_json(m.rhp);
    mj["rhp_core"] = m.rhp_core ? rhp_json(*m.rhp_core) : Json(nullptr);
    mj["amplification"] = opt_json(m.amplification);
    mj["eb_time"] = opt_json(m.eb_time);
    mj["eb_horizon_limited"] = m.eb_horizon_limited;
    mj["lower_bounds"] = m.lower_bounds;
    j["measures"] = std::move(mj);
  } else {
    j["measures"] = nullptr;
  }
  j["notes"] = notes;
  return j;
}

inline ReportDocument ReportDocument::from_json(const Json& j) {
  using namespace detail;
  ReportDocument d;
  d.tool = j.at("tool").at("name").get<std::string>();
  d.version = j.at("tool").at("version").get<std::string>();
  d.seed = j.at("seed").get<std::uint64_t>();
  d.config = j.at("config");
  d.family = j.at("family").get<std::string>();
  const Json& v = j.at("validation");
  d.validation.valid = v.at("valid").get<bool>();
  d.validation.initial_identity = v.at("initial_identity").get<bool>();
  d.validation.non_bijective_time = opt_double(v, "non_bijective_time");
  d.validation.min_dynamical_choi = v.at("min_dynamical_choi").get<double>();
  d.validation.issues = v.at("issues").get<std::vector<std::string>>();
  d.times = times_from(j.at("times"));
  d.T_divisible = opt_double(j, "T_divisible");
  if (const Json& g = j.at("grid"); !g.is_null()) {
    ReportGrid r;
    r.n = g.at("n").get<int>();
    r.horizon = g.at("horizon").get<double>();
    r.min_value = g.at("min_value").get<double>();
    r.min_s = g.at("min_s").get<double>();
    r.min_t = g.at("min_t").get<double>();
    r.cptp = g.at("cptp").get<std::size_t>();
    r.non_cptp = g.at("non_cptp").get<std::size_t>();
    r.undefined = g.at("undefined").get<std::size_t>();
    r.composition_checked = g.at("composition_checked").get<std::size_t>();
    r.composition_violations = g.at("composition_violations").get<std::size_t>();
    r.non_cptp_pairs_composing_to_cptp = g.at("non_cptp_pairs_composing_to_cptp").get<std::size_t>();
    d.grid = r;
  }
  if (const Json& c = j.at("core"); !c.is_null()) {
    ReportCore r;
    r.shift = c.at("shift").get<double>();
    r.description = c.at("description").get<std::string>();
    r.computed = times_from(c.at("computed"));
    r.from_parent = times_from(c.at("from_parent"));
    r.delta = opt_double(c, "delta");
    d.core = r;
  }
  if (const Json& m = j.at("measures"); !m.is_null()) {
    ReportMeasures r;
    r.pair = m.at("pair").get<std::string>();
    r.delta = opt_double(m, "delta");
    r.f_at_T = opt_double(m, "f_at_T");
    r.M_D = opt_double(m, "M_D");
    r.M_D_core = opt_double(m, "M_D_core");
    r.M_mix = opt_double(m, "M_mix");
    r.M_mix_core = opt_double(m, "M_mix_core");
    r.flux = flux_from(m.at("flux"));
    if (!m.at("flux_core").is_null()) r.flux_core = flux_from(m.at("flux_core"));
    r.rhp = rhp_from(m.at("rhp"));
    if (!m.at("rhp_core").is_null()) r.rhp_core = rhp_from(m.at("rhp_core"));
    r.amplification = opt_double(m, "amplification");
    r.eb_time = opt_double(m, "eb_time");
    r.eb_horizon_limited = m.at("eb_horizon_limited").get<bool>();
    r.lower_bounds = m.at("lower_bounds").get<bool>();
    d.measures = r;
  }
  d.notes = j.at("notes").get<std::vector<std::string>>();
  return d;
}

// ---------------------------------------------------------------------------
// Pipeline

/// Default initial pair: |0>,|1> for depolarizing maps (all orthogonal pairs
/// are equivalent there), |+>,|-> for Pauli families, whose non-Markovian
/// component acts on the x-y coherences.
inline StatePair default_pair(const Evolution& e) {
  if (e.family() == Family::Depolarizing) return StatePair::orthogonal_basis(e.dim());
  CVector plus(2), minus(2);
  const double r = 1.0 / std::sqrt(2.0);
  plus << r, r;
  minus << r, -r;
  return {DensityMatrix::pure(plus), DensityMatrix::pure(minus)};
}

inline std::string describe(const Evolution& e) {
  const auto& sp = e.spec();
  if (auto* d = std::get_if<DepolarizingSpec>(&sp)) {
    return "depolarizing d=" + std::to_string(d->dim) + ", f(t) = " + d->f.text();
  }
  if (auto* q = std::get_if<QuasiEternalSpec>(&sp)) {
    return "quasi-eternal alpha=" + detail::format_number(q->alpha) + ", t0=" +
           detail::format_number(q->t0) + ", tU=" + detail::format_number(q->t_unitary);
  }
  if (auto* r = std::get_if<PauliRatesSpec>(&sp)) {
    return "Pauli rates {" + r->gx.text() + ", " + r->gy.text() + ", " + r->gz.text() + "}";
  }
  if (auto* p = std::get_if<PauliProbsSpec>(&sp)) {
    return "Pauli probabilities {" + p->px.text() + ", " + p->py.text() + ", " + p->pz.text() + "}";
  }
  const auto& s = std::get<ShiftedSpec>(sp);
  return "V_{t+" + detail::format_number(s.shift) + "," + detail::format_number(s.shift) + "} of " +
         describe(*s.parent);
}

struct ReportSections {
  bool grid = true;
  bool core = true;
  bool measures = true;
  int composition_samples = 10000;
};

inline ReportMeasures compute_measures(const Evolution& e, const CharTimes& ct, double horizon,
                                       int n, const std::optional<Evolution>& core,
                                       double core_horizon) {
  ReportMeasures m;
  const StatePair pair = default_pair(e);
  m.pair = e.family() == Family::Depolarizing ? "|0>,|1>" : "|+>,|->";
  const auto* dep = std::get_if<DepolarizingSpec>(&e.spec());
  m.lower_bounds = dep == nullptr;

  auto flux_of = [&](const Evolution& ev, double h) {
    const auto f = integrate_flux_measures(flux_series(ev, pair, h, n));
    return ReportFlux{f.M_W, f.M_W_max, f.M_W_av};
  };
  auto rhp_of = [&](const Evolution& ev, double h) {
    const auto r = rhp_measure(ev, h, n);
    return ReportRhp{r.divergent ? std::nullopt : std::optional<double>(r.value), r.divergent,
                     r.converged};
  };

  m.flux = flux_of(e, horizon);
  m.rhp = rhp_of(e, horizon);
  if (core) {
    m.flux_core = flux_of(*core, core_horizon);
    m.rhp_core = rhp_of(*core, core_horizon);
  }
  if (dep) {
    m.delta = revivals_delta(dep->f, horizon, n);
    if (ct.T.finite()) {
      const double fT = dep->f.eval_finite(ct.T.value);
      m.f_at_T = fT;
      if (fT > 0.0) {
        const auto dm = depolarizing_measures(*m.delta, fT);
        m.M_D = dm.M_D;
        m.M_D_core = dm.M_D_core;
        m.M_mix = dm.M_mix;
        m.M_mix_core = dm.M_mix_core;
      }
    }
  }
  if (ct.T.finite()) {
    try {
      m.amplification = amplification_factor(e, pair, ct.T.value);
    } catch (const DegeneratePair&) {
    }
  }
  if (e.dim() == 2) {
    const auto eb = eb_time_qubit(e, horizon, n);
    m.eb_time = eb.time;
    m.eb_horizon_limited = eb.horizon_limited;
  }
  return m;
}

inline ReportDocument run_report(const AnalysisConfig& cfg, const ReportSections& sections = {}) {
  ReportDocument doc;
  doc.seed = cfg.seed;
  doc.config = cfg.echo();
  const double H = cfg.horizon;
  const int n = cfg.grid_points;
  const AnalysisOptions opt = cfg.options();

  const ValidationReport val = validate_spec(cfg.evolution, H, n);
  doc.validation = {val.valid, val.initial_identity, val.non_bijective_time, val.min_dynamical_choi,
                    val.issues};
  const Evolution e(cfg.evolution, H);
  doc.family = family_name(e.family());

  const CharTimes ct = characteristic_times(e, H, opt);
  doc.times = ReportTimes::from(ct);
  if (std::isfinite(ct.T_divisible)) doc.T_divisible = ct.T_divisible;
  if (ct.T.finite() && ct.T.value == 0.0 && ct.T_divisible > 0.0) {
    doc.notes.push_back("Lambda_T is unitary at the divisibility time " +
                        detail::format_number(ct.T_divisible) + "; T reported as 0");
  }
  if (e.family() == Family::PauliRates) {
    doc.notes.push_back("rate sign changes faster than the grid step (" +
                        detail::format_number(H / (n - 1)) + ") are not resolved");
  }

  if (sections.grid) {
    const CptpGrid g = scan_regions(e, H, n, opt.cptp_tol);
    ReportGrid rg;
    rg.n = n;
    rg.horizon = H;
    const auto& mn = g.minimum();
    rg.min_value = mn.value;
    rg.min_s = mn.s;
    rg.min_t = mn.t;
    rg.cptp = g.count(CellClass::Cptp);
    rg.non_cptp = g.count(CellClass::NonCptp);
    rg.undefined = g.count(CellClass::Undefined);
    const auto comp = verify_composition_rules(g, sections.composition_samples, cfg.seed);
    rg.composition_checked = comp.checked;
    rg.composition_violations = comp.violations.size();
    rg.non_cptp_pairs_composing_to_cptp = comp.non_cptp_pairs_composing_to_cptp;
    doc.grid = rg;
  }

  std::optional<Evolution> core;
  const double core_horizon = ct.T.finite() ? H - ct.T.value : H;
  if (sections.core && ct.classification == Classification::NNM) {
    core = extract_pnm_core(e, ct.T.value);
    ReportCore rc;
    rc.shift = ct.T.value;
    rc.description = describe(*core);
    rc.computed = ReportTimes::from(characteristic_times(*core, core_horizon, opt));
    rc.from_parent = ReportTimes::from(shifted_core_times(ct));
    if (const auto* d = std::get_if<DepolarizingSpec>(&core->spec())) {
      rc.delta = revivals_delta(d->f, core_horizon, n);
    }
    doc.core = rc;
  }

  if (sections.measures) doc.measures = compute_measures(e, ct, H, n, core, core_horizon);
  if (doc.measures && doc.measures->lower_bounds) {
    doc.notes.push_back("flux measures use a fixed initial pair and are lower bounds");
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Grid export

/// CSV with header "s,t,value,class", 12 significant digits, LF endings.
inline void export_grid_csv(const CptpGrid& g, std::ostream& out) {
  out << "s,t,value,class\n";
  char buf[128];
  for (const auto& c : g.cells) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%s\n", c.s, c.t, c.value,
                  cell_class_name(c.cls));
    out << buf;
  }
}

inline Json export_grid_json(const CptpGrid& g) {
  Json cells = Json::array();
  for (const auto& c : g.cells) {
    cells.push_back({{"s", c.s},
                     {"t", c.t},
                     {"value", std::isfinite(c.value) ? Json(c.value) : Json(nullptr)},
                     {"class", cell_class_name(c.cls)},
                     {"undefined", c.undefined}});
  }
  return Json{{"horizon", g.horizon}, {"n", g.n}, {"tol", g.tol}, {"cells", std::move(cells)}};
}

/// Flux series of the default pair as CSV "t,W,sigma" (sigma empty on the last row).
inline void export_flux_csv(const FluxSeries& fs, std::ostream& out) {
  out << "t,W,sigma\n";
  char buf[128];
  for (std::size_t k = 0; k < fs.times.size(); ++k) {
    if (k < fs.sigma.size()) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", fs.times[k], fs.W[k], fs.sigma[k]);
    } else {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,\n", fs.times[k], fs.W[k]);
    }
    out << buf;
  }
}

}  // namespace pnm

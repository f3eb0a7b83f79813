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

// Acceptance checks: one PASS/FAIL line per criterion, details on failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pnm/pnm.hpp"

using namespace pnm;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void near(const std::string& what, double got, double want, double tol) {
    const bool ok = std::isfinite(got) && std::abs(got - want) <= tol;
    note(ok, what + " = " + fmt(got) + " (expected " + fmt(want) + " +/- " + fmt(tol) + ")");
  }

  void that(const std::string& what, bool ok) { note(ok, what); }

  bool report() const {
    std::printf("%s criterion %d: %s\n", failures_.empty() ? "PASS" : "FAIL", id_, title_.c_str());
    for (const auto& f : failures_) std::printf("    %s\n", f.c_str());
    for (const auto& l : log_) std::printf("    . %s\n", l.c_str());
    return failures_.empty();
  }

  void log(const std::string& line) { log_.push_back(line); }

 private:
  static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void note(bool ok, const std::string& what) {
    if (!ok) failures_.push_back("failed: " + what);
  }

  int id_;
  std::string title_;
  std::vector<std::string> failures_;
  std::vector<std::string> log_;
};

Evolution preset(const std::string& name, double horizon = 5.0) {
  return Evolution(preset_spec(name), horizon);
}

StatePair plus_minus() {
  CVector p(2), m(2);
  p << 1.0, 1.0;
  m << 1.0, -1.0;
  return {DensityMatrix::pure(p / std::sqrt(2.0)), DensityMatrix::pure(m / std::sqrt(2.0))};
}

double f_at(const Evolution& e, double t) { return std::get<DepolarizingSpec>(e.spec()).f(t); }

bool criterion1() {
  Criterion c(1, "depolarizing example: T, tau, t*, f(T), revival");
  const auto e = preset("paper-example");
  const auto ct = characteristic_times(e, 5.0);
  c.near("T", ct.T.value, 0.275, 0.005);
  c.near("tau", ct.tau.value, 0.495, 0.005);
  c.near("t*", ct.t_star.value, 1.040, 0.005);
  c.near("f(T)", f_at(e, ct.T.value), 0.334, 0.005);
  c.near("Delta", revivals_delta(std::get<DepolarizingSpec>(e.spec()).f, 5.0), 0.164, 0.005);
  return c.report();
}

bool criterion2() {
  Criterion c(2, "depolarizing example: measures, amplification, core times");
  const auto e = preset("paper-example");
  const auto ct = characteristic_times(e, 5.0);
  const double delta = revivals_delta(std::get<DepolarizingSpec>(e.spec()).f, 5.0);
  const auto m = depolarizing_measures(delta, f_at(e, ct.T.value));
  c.near("M_D", m.M_D, 0.328, 0.01);
  c.near("M_D(core)", m.M_D_core, 0.983, 0.01);
  c.near("M_mix", m.M_mix, 0.141, 0.005);
  c.near("M_mix(core)", m.M_mix_core, 0.329, 0.005);
  c.near("amplification", amplification_factor(e, StatePair::orthogonal_basis(2), ct.T.value), 2.990, 0.05);
  const auto core = extract_pnm_core(e, ct.T.value);
  const auto cct = characteristic_times(core, core.horizon());
  c.near("core tau", cct.tau.value, 0.220, 0.005);
  c.near("core t*", cct.t_star.value, 0.765, 0.005);
  const auto shifted = shifted_core_times(ct);
  c.near("core tau (shifted)", shifted.tau.value, 0.220, 0.005);
  c.near("core t* (shifted)", shifted.t_star.value, 0.765, 0.005);
  // The core's own flux measure reproduces the closed form.
  const auto flux = integrate_flux_measures(flux_series(core, StatePair::orthogonal_basis(2), core.horizon(), 400));
  c.near("core M_W", flux.M_W, m.M_D_core, 0.01);
  return c.report();
}

bool criterion3() {
  Criterion c(3, "depolarizing example: grid minimum and its location");
  const auto g = scan_regions(preset("paper-example"), 5.0, 400);
  const auto& m = g.minimum();
  c.near("min cell value", m.value, -0.241, 0.005);
  c.near("at s", m.s, 0.495, 0.02);
  c.near("at t", m.t, 1.040, 0.02);
  c.that("minimum cell is NonCPTP", m.cls == CellClass::NonCptp);
  return c.report();
}

bool criterion4() {
  Criterion c(4, "non-invertible example: times, revivals, undefined maps");
  const auto e = preset("appendix-f");
  const auto ct = characteristic_times(e, 5.0);
  c.near("T", ct.T.value, 0.125, 0.001);
  c.near("tau", ct.tau.value, 0.5, 0.002);
  c.near("t*", ct.t_star.value, 1.5, 0.002);
  const auto& f = std::get<DepolarizingSpec>(e.spec()).f;
  c.near("Delta", revivals_delta(f, 5.0), 0.64, 0.002);
  const auto core = extract_pnm_core(e, ct.T.value);
  c.near("core Delta", revivals_delta(std::get<DepolarizingSpec>(core.spec()).f, core.horizon()), 1.0, 0.005);
  c.that("intermediate map from s = 0.5 is undefined", !e.intermediate_map(0.5, 1.0).has_value());
  c.that("cell (0.5, 1.0) is flagged undefined", e.cell_value(0.5, 1.0).undefined);
  const auto g = scan_regions(e, 5.0, 41);
  bool undefined_row = true;
  for (int j = 5; j < 41; ++j) {
    const auto& cell = g.at(4, j);  // s = 0.5
    undefined_row = undefined_row && cell.undefined && cell.cls != CellClass::Cptp;
  }
  c.that("grid row s = 0.5 carries Undefined/NonCPTP classes", undefined_row);
  return c.report();
}

bool criterion5() {
  Criterion c(5, "quasi-eternal model: t0_alpha, T, tau, eternal scan");
  c.near("t0_alpha(0.1)", t0_alpha(0.1), 3.4657, 0.001);
  const Evolution q(QuasiEternalSpec{0.1, 4.0, 0.0}, 100.0);
  const auto ct = characteristic_times(q, 100.0);
  c.near("T(alpha=0.1, t0=4)", ct.T.value, 0.534, 0.005);
  c.near("T vs t0 - t0_alpha", ct.T.value, 4.0 - t0_alpha(0.1), 0.005);
  const std::vector<std::pair<double, double>> settings{{0.1, 4.0}, {0.1, t0_alpha(0.1)}, {0.5, 1.5}};
  for (auto [alpha, t0] : settings) {
    const Evolution e(QuasiEternalSpec{alpha, t0, 0.0}, 100.0);
    std::ostringstream what;
    what << "tau(alpha=" << alpha << ", t0=" << t0 << ")";
    c.near(what.str(), compute_tau_lambda(e, 100.0).value, t0, 0.005);
  }
  const auto g = scan_regions(preset("eternal", 3.0), 3.0, 200);
  std::size_t interior = 0, non = 0;
  for (const auto& cell : g.cells) {
    if (cell.s > 0 && cell.s < cell.t) {
      ++interior;
      non += cell.cls == CellClass::NonCptp;
    }
  }
  c.that("every interior eternal cell NonCPTP (" + std::to_string(non) + "/" + std::to_string(interior) + ")",
         non == interior && interior > 0);
  return c.report();
}

bool criterion6() {
  Criterion c(6, "rate integration reproduces closed-form Pauli weights");
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 5.0}) {
    const double t0 = t0_alpha(alpha);
    std::ostringstream gz;
    gz.precision(17);
    gz << "-" << alpha / 2 << "*tanh(t-" << t0 << ")";
    const auto gxy = ScalarFn::constant(alpha / 2);
    const auto g3 = ScalarFn::parse(gz.str());
    for (int k = 1; k <= 50; ++k) {
      const double t = 5.0 * k / 50;
      const auto p = pauli_from_rates(gxy, gxy, g3, t);
      const auto want = oracle::quasi_eternal(alpha, t0, 0.0, t);
      for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(p[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)]));
    }
  }
  c.near("max weight deviation over 150 samples", worst, 0.0, 1e-6);
  return c.report();
}

bool criterion7() {
  Criterion c(7, "property suites");
  const double H = 5.0;
  std::mt19937_64 rng(1);

  for (const auto& p : catalog()) {
    const auto e = preset(p.name, H);
    const auto ct = characteristic_times(e, H);
    const double step = H / 399;
    if (ct.T.finite() && ct.tau.finite()) c.that(p.name + ": T <= tau", ct.T.value <= ct.tau.value + 1e-9);
    if (ct.tau.finite() && ct.t_star.finite()) c.that(p.name + ": tau <= t*", ct.tau.value <= ct.t_star.value + step);

    const auto g = scan_regions(e, H, 150);
    const auto comp = verify_composition_rules(g, 10000, 1);
    c.that(p.name + ": composition rules", comp.ok() && comp.checked > 9000);

    for (const auto& pair : {StatePair::orthogonal_basis(2), plus_minus()}) {
      const auto fs = flux_series(e, pair, H, 150);
      bool backflow_ok = true;
      for (std::size_t k = 0; k < fs.sigma.size(); ++k) {
        if (fs.sigma[k] > 1e-9) backflow_ok = backflow_ok && g.at(static_cast<int>(k), static_cast<int>(k + 1)).cls != CellClass::Cptp;
      }
      c.that(p.name + ": backflow implies non-CPTP cell", backflow_ok);
      const auto m = integrate_flux_measures(fs);
      c.that(p.name + ": M_W_av <= M_W_max <= M_W", m.M_W_av <= m.M_W_max + 1e-12 && m.M_W_max <= m.M_W + 1e-12);
    }
  }

  // RHP equality and core dominance on the NNM entries.
  struct Case {
    std::string name;
    Evolution e;
    double horizon;
  };
  std::vector<Case> nnm{{"paper-example", preset("paper-example"), 5.0},
                        {"appendix-f", preset("appendix-f"), 5.0},
                        {"quasi-eternal(0.1, 4)", Evolution(QuasiEternalSpec{0.1, 4.0, 0.0}, 100.0), 100.0},
                        {"quasi-eternal", preset("quasi-eternal"), 5.0}};
  for (const auto& k : nnm) {
    const auto ct = characteristic_times(k.e, k.horizon);
    c.that(k.name + ": NNM", ct.classification == Classification::NNM);
    const double T = ct.T.value;
    const auto core = extract_pnm_core(k.e, T);
    const auto rp = rhp_measure(k.e, k.horizon);
    const auto rc = rhp_measure(core, k.horizon - T);
    if (rp.divergent || rc.divergent) {
      c.that(k.name + ": RHP divergent for parent and core alike", rp.divergent && rc.divergent);
    } else {
      c.near(k.name + ": RHP(core) - RHP(parent)", rc.value - rp.value, 0.0, 1e-4);
    }
    const int n = 400;
    const double step = k.horizon / (n - 1);
    const int nc = static_cast<int>(std::lround((k.horizon - T) / step)) + 1;
    for (const auto& pair : {StatePair::orthogonal_basis(2), plus_minus()}) {
      const auto mp = integrate_flux_measures(flux_series(k.e, pair, k.horizon, n));
      const auto mc = integrate_flux_measures(flux_series(core, pair, k.horizon - T, nc));
      c.that(k.name + ": core dominates flux measures",
             mc.M_W >= mp.M_W - 1e-9 && mc.M_W_max >= mp.M_W_max - 1e-9 && mc.M_W_av >= mp.M_W_av - 1e-9);
    }
    if (const auto* d = std::get_if<DepolarizingSpec>(&k.e.spec())) {
      const auto m = depolarizing_measures(revivals_delta(d->f, k.horizon), d->f(T));
      c.that(k.name + ": core dominates M_D and M_mix", m.M_D_core >= m.M_D && m.M_mix_core >= m.M_mix);
    }
  }

  // Orthogonal pairs from random traceless hermitian operators.
  std::normal_distribution<double> gauss;
  bool pairs_ok = true;
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 3;
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = {gauss(rng), gauss(rng)};
    CMatrix h = a + a.adjoint();
    h -= h.trace() / static_cast<double>(d) * CMatrix::Identity(d, d);
    const auto p = orthogonal_pair_from_difference(h);
    const oracle::CMat diff = p.difference();
    pairs_ok = pairs_ok && std::abs(oracle::trace_norm(diff) - 2.0) <= 1e-9 &&
               (p.rho1.matrix() * p.rho2.matrix()).cwiseAbs().maxCoeff() <= 1e-9 &&
               (diff - 2.0 * h / oracle::trace_norm(h)).cwiseAbs().maxCoeff() <= 1e-9;
  }
  c.that("orthogonal-pair postconditions on 100 random inputs (dims 2-4)", pairs_ok);
  return c.report();
}

bool criterion8() {
  Criterion c(8, "entanglement-breaking threshold of depolarizing maps");
  // Oracle: the partial transpose of the Choi state turns negative above f*.
  const auto margin = [](double f) {
    return oracle::min_eigenvalue(oracle::partial_transpose(oracle::choi(2, oracle::depolarizing(2, f)), 2));
  };
  const double f_star = oracle::first_root([&](double f) { return -margin(f); }, 0.0, 1.0);
  c.near("oracle PPT threshold", f_star, 1.0 / 3.0, 1e-6);
  bool flags = true;
  for (int k = 0; k <= 200; ++k) {
    const double f = -1.0 / 3.0 + (4.0 / 3.0) * k / 200;
    if (std::abs(f - 1.0 / 3.0) < 1e-6) continue;
    flags = flags && is_eb_qubit(depolarizing_map(2, f)) == (margin(f) >= -1e-12);
  }
  c.that("is_eb_qubit flags f <= 1/3 exactly as the PPT oracle", flags);
  const Evolution e(DepolarizingSpec{2, ScalarFn::parse("exp(-t)")});
  const auto r = eb_time_qubit(e, 5.0);
  c.that("an onset is found", r.time.has_value());
  if (r.time) {
    c.near("f at the EB onset", std::exp(-*r.time), f_star, 1e-4);
    c.near("EB onset for f = exp(-t)", *r.time, std::log(3.0), 0.005);
  }
  return c.report();
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                     criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (const auto& run : criteria) {
    try {
      failed += run() ? 0 : 1;
    } catch (const std::exception& ex) {
      std::printf("FAIL (exception: %s)\n", ex.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

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

#include <cmath>
#include <random>
#include <string>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "pnm/analysis.hpp"
#include "pnm/evolutions.hpp"

using Catch::Approx;
using namespace pnm;

namespace {

// The two depolarizing characteristic functions, written out by hand.
double f_example(double t) {
  return (1 - 3 * t + 2 * t * t + 2 * t * t * t) / (1 + t * t + t * t * t + 3 * std::pow(t, 5));
}
double f_appendix(double t) { return (2 * t - 1) * (2 * t - 1) / (2 * t * t * t - t + 1); }

// Depolarizing times from f alone: tau is the first zero of f', T the first
// time f comes down to the largest value f takes after tau, and t* the
// place where f climbs back to that value (a tangent return at the maximum
// for both catalog functions).
struct DepolarizingOracle {
  double T, tau, t_star, fT;
};

DepolarizingOracle depolarizing_oracle(const std::function<double(double)>& f, double horizon) {
  const double h = 1e-6;
  const auto df = [&](double t) { return (f(t + h) - f(t - h)) / (2 * h); };
  const double tau = oracle::first_root(df, 1e-3, horizon);
  const auto [t_star, peak] = oracle::dense_argmax(f, tau, horizon);
  const double T = oracle::first_root([&](double t) { return f(t) - peak; }, 0.0, tau);
  return {T, tau, t_star, peak};
}

Evolution preset(const std::string& name, double horizon = 5.0) {
  return Evolution(preset_spec(name), horizon);
}

double step(double horizon, int n) { return horizon / (n - 1); }

}  // namespace

TEST_CASE("scan examples") {
  SECTION("monotone f gives an all-CPTP grid") {
    const Evolution e(DepolarizingSpec{2, ScalarFn::parse("exp(-t)")});
    const auto g = scan_regions(e, 5.0, 40);
    CHECK(g.count(CellClass::Cptp) == g.cells.size());
  }
  SECTION("rational depolarizing preset: rows up to T are CPTP") {
    const auto g = scan_regions(preset("paper-example"), 2.5, 200);
    const auto T = depolarizing_oracle(f_example, 2.5).T;
    std::size_t non = 0;
    for (const auto& c : g.cells) {
      if (c.s <= T) CHECK(c.cls == CellClass::Cptp);
      non += c.cls == CellClass::NonCptp;
    }
    CHECK(non > 0);
  }
  SECTION("eternal: every interior cell is non-CPTP") {
    const auto g = scan_regions(preset("eternal", 3.0), 3.0, 60);
    for (const auto& c : g.cells) {
      if (c.s > 0 && c.s < c.t) CHECK(c.cls == CellClass::NonCptp);
    }
  }
  SECTION("grid layout") {
    const auto g = scan_regions(preset("paper-example"), 5.0, 16);
    CHECK(g.cells.size() == 16u * 17u / 2u);
    CHECK(g.times.front() == 0.0);
    CHECK(g.times.back() == Approx(5.0));
    for (int i = 0; i < 16; ++i)
      for (int j = i; j < 16; ++j) {
        CHECK(g.at(i, j).s == g.times[static_cast<std::size_t>(i)]);
        CHECK(g.at(i, j).t == g.times[static_cast<std::size_t>(j)]);
      }
    CHECK_THROWS_AS(g.at(3, 2), DomainError);
    CHECK_THROWS_AS(scan_regions(preset("paper-example"), 0.0, 16), DomainError);
  }
}

TEST_CASE("grid invariants on the catalog") {
  for (const auto& p : catalog()) {
    INFO(p.name);
    const auto e = preset(p.name);
    const auto g = scan_regions(e, 5.0, 40);
    for (const auto& c : g.cells) {
      if (c.s == c.t) {
        CHECK(std::abs(c.value) <= 1e-10);
        CHECK(c.cls == CellClass::Cptp);
      }
      // The border s = 0 is the dynamical map itself.
      if (c.s == 0.0) CHECK(c.cls == CellClass::Cptp);
      if (c.s < c.t && std::isfinite(c.value)) CHECK((c.cls == CellClass::NonCptp) == (c.value < -g.tol));
    }
  }
}

TEST_CASE("rational depolarizing preset grid minimum") {
  const int n = 400;
  const auto g = scan_regions(preset("paper-example"), 5.0, n);
  const auto& m = g.minimum();
  CHECK(m.value == Approx(-0.241).margin(0.005));
  CHECK(m.s == Approx(0.495).margin(0.02));
  CHECK(m.t == Approx(1.040).margin(0.02));
  // Oracle: Choi spectrum of the depolarizing map with ratio f(t)/f(s).
  double best = 0.0;
  for (int i = 0; i < n; i += 3)
    for (int j = i + 1; j < n; j += 3) {
      const double s = g.times[static_cast<std::size_t>(i)], t = g.times[static_cast<std::size_t>(j)];
      const double ratio = f_example(t) / f_example(s);
      const double lam = oracle::min_eigenvalue(oracle::choi(2, oracle::depolarizing(2, ratio)));
      CHECK(g.at(i, j).value == Approx(lam).margin(1e-10));
      best = std::min(best, lam);
    }
  CHECK(m.value <= best + 1e-12);
}

TEST_CASE("characteristic times: depolarizing") {
  SECTION("rational depolarizing preset") {
    const auto e = preset("paper-example");
    const auto ct = characteristic_times(e, 5.0);
    const auto o = depolarizing_oracle(f_example, 5.0);
    CHECK(ct.T.value == Approx(o.T).margin(1e-4));
    CHECK(ct.tau.value == Approx(o.tau).margin(1e-4));
    CHECK(ct.t_star.value == Approx(o.t_star).margin(1e-4));
    CHECK(ct.T.value == Approx(0.275).margin(0.005));
    CHECK(ct.tau.value == Approx(0.495).margin(0.002));
    CHECK(ct.t_star.value == Approx(1.040).margin(0.005));
    CHECK(f_example(ct.T.value) == Approx(0.334).margin(0.005));
    CHECK(f_example(ct.t_star.value) == Approx(f_example(ct.T.value)).margin(1e-3));
    CHECK(ct.classification == Classification::NNM);
  }
  SECTION("non-invertible example") {
    const auto e = preset("appendix-f");
    REQUIRE(e.non_bijective_time());
    CHECK(*e.non_bijective_time() == Approx(0.5).margin(1e-9));
    const auto ct = characteristic_times(e, 5.0);
    // f(1/8) = f(3/2) = 16/25 is the local maximum after the zero at 1/2.
    CHECK(f_appendix(0.125) == Approx(0.64));
    CHECK(f_appendix(1.5) == Approx(0.64));
    CHECK(ct.T.value == Approx(0.125).margin(1e-3));
    CHECK(ct.tau.value == Approx(0.5).margin(2e-3));
    CHECK(ct.t_star.value == Approx(1.5).margin(2e-3));
    CHECK(f_appendix(ct.t_star.value) == Approx(f_appendix(ct.T.value)).margin(1e-3));
    CHECK(ct.classification == Classification::NNM);
  }
  SECTION("monotone f is Markovian") {
    const Evolution e(DepolarizingSpec{2, ScalarFn::parse("exp(-t)")});
    const auto ct = characteristic_times(e, 5.0);
    CHECK_FALSE(ct.T.finite());
    CHECK(ct.T.horizon_limited);
    CHECK_FALSE(ct.tau.finite());
    CHECK(ct.classification == Classification::Markovian);
  }
  SECTION("constant f is unitary") {
    const Evolution e(DepolarizingSpec{2, ScalarFn::parse("1")});
    CHECK(characteristic_times(e, 5.0).classification == Classification::UnitaryTrivial);
  }
}

TEST_CASE("characteristic times: quasi-eternal") {
  SECTION("T = t0 - t0_alpha, tau = t0") {
    for (auto [alpha, t0] : {std::pair{0.1, 4.0}, {0.5, 1.5}, {0.3, 3.0}}) {
      INFO("alpha " << alpha << " t0 " << t0);
      const Evolution e(QuasiEternalSpec{alpha, t0, 0.0}, 100.0);
      const auto ct = characteristic_times(e, 100.0);
      CHECK(ct.T.value == Approx(t0 - t0_alpha(alpha)).margin(5e-3));
      CHECK(ct.tau.value == Approx(t0).margin(5e-3));
      CHECK(ct.classification == Classification::NNM);
    }
  }
  SECTION("t0 = t0_alpha: tau = t0") {
    const Evolution e(QuasiEternalSpec{0.1, t0_alpha(0.1), 0.0});
    CHECK(characteristic_times(e, 5.0).tau.value == Approx(3.465).margin(5e-3));
  }
  SECTION("eternal") {
    const auto ct = characteristic_times(preset("eternal", 3.0), 3.0);
    CHECK(ct.T.value == 0.0);
    CHECK(ct.tau.value == 0.0);
    CHECK(ct.t_star.value == 0.0);
    CHECK(ct.classification == Classification::PNM);
  }
  SECTION("unitary prefix: T = 0 by the non-unitarity requirement") {
    const auto ct = characteristic_times(preset("unitary-prefix"), 5.0);
    CHECK(ct.T.value == 0.0);
    CHECK(ct.T_divisible == Approx(1.0).margin(1e-4));
    CHECK(ct.tau.value == Approx(1.0).margin(1e-4));
    CHECK(ct.t_star.value == Approx(1.0).margin(1e-4));
    CHECK(ct.classification == Classification::PNM);
  }
}

TEST_CASE("catalog properties") {
  const double H = 5.0;
  const int n = 200;
  for (const auto& p : catalog()) {
    INFO(p.name);
    const auto e = preset(p.name, H);
    AnalysisOptions opt;
    opt.grid_points = n;
    const auto ct = characteristic_times(e, H, opt);
    const double tol = step(H, n);
    if (ct.T.finite() && ct.tau.finite()) CHECK(ct.T.value <= ct.tau.value + 1e-9);
    if (ct.tau.finite() && ct.t_star.finite()) CHECK(ct.tau.value <= ct.t_star.value + tol);
    if (ct.classification == Classification::PNM) CHECK(ct.T.value == 0.0);
    if (ct.classification == Classification::NNM) CHECK((ct.T.value > 0 && ct.T.finite()));

    // The sin(1/t) rate changes sign faster than any grid near 0; its times
    // are resolution-limited and the grid-level lemmas do not apply.
    if (p.name == "pathological" || ct.classification == Classification::Markovian) continue;

    // No non-CPTP cell starts before the divisibility time, and one starts
    // within two grid steps after it. The divisibility time differs from T
    // only when the non-unitarity requirement resets T to 0.
    const double Td = ct.T_divisible;
    const auto g = scan_regions(e, H, n);
    bool near = false;
    for (const auto& c : g.cells) {
      if (c.cls != CellClass::NonCptp) continue;
      CHECK(c.s > Td - 1e-9);
      if (c.s > Td && c.s <= Td + 2 * tol) near = true;
    }
    CHECK(near);

    // Every V_{t*, s} with s strictly between the divisibility time and t*
    // is non-CPTP.
    if (ct.t_star.finite() && Td < ct.t_star.value) {
      const double d = 0.01;
      for (int k = 0; k < 50; ++k) {
        const double s = Td + d + (ct.t_star.value - Td - 2 * d) * k / 49.0;
        if (s >= ct.t_star.value - d) break;
        const auto c = e.cell_value(s, ct.t_star.value);
        INFO("s = " << s);
        CHECK(c.value < -g.tol);
      }
    }
  }
}

TEST_CASE("pathological model is resolution-limited") {
  const auto e = preset("pathological", 2.0);
  AnalysisOptions opt;
  const auto ct = characteristic_times(e, 2.0, opt);
  REQUIRE(ct.tau.finite());
  // Detected within the first few grid steps; the true onset is 0.
  CHECK(ct.tau.value <= 5 * step(2.0, opt.grid_points));
  CHECK(ct.T.value <= ct.tau.value);
}

TEST_CASE("PNM core") {
  SECTION("T = 0 returns the same evolution") {
    const auto e = preset("eternal");
    const auto c = extract_pnm_core(e, 0.0);
    for (double t : {0.3, 1.7}) CHECK((c.dynamical_map(t).matrix() - e.dynamical_map(t).matrix()).norm() < 1e-12);
  }
  SECTION("rational depolarizing preset") {
    const auto e = preset("paper-example");
    const auto ct = characteristic_times(e, 5.0);
    const auto core = extract_pnm_core(e, ct.T.value);
    CHECK((core.dynamical_map(0.0).matrix() - identity_map(2).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    const auto& cf = std::get<DepolarizingSpec>(core.spec()).f;
    for (double t : {0.0, 0.2, 0.9, 3.1})
      CHECK(cf(t) == Approx(f_example(t + ct.T.value) / f_example(ct.T.value)).epsilon(1e-12));

    const auto cct = characteristic_times(core, core.horizon());
    CHECK(cct.T.value == 0.0);
    CHECK(cct.classification == Classification::PNM);
    const auto shifted = shifted_core_times(ct);
    CHECK(cct.tau.value == Approx(shifted.tau.value).margin(1e-3));
    CHECK(cct.t_star.value == Approx(shifted.t_star.value).margin(1e-3));
    CHECK(shifted.tau.value == Approx(0.220).margin(0.005));
    CHECK(shifted.t_star.value == Approx(0.765).margin(0.005));

    // The core of the core is the core.
    const auto again = extract_pnm_core(core, cct.T.value);
    const auto act = characteristic_times(again, again.horizon());
    CHECK(act.T.value == cct.T.value);
    CHECK(act.tau.value == Approx(cct.tau.value).margin(step(5.0, 400)));
    CHECK(act.t_star.value == Approx(cct.t_star.value).margin(step(5.0, 400)));
  }
  SECTION("non-invertible example") {
    const auto e = preset("appendix-f");
    const auto core = extract_pnm_core(e, 0.125);
    const auto& cf = std::get<DepolarizingSpec>(core.spec()).f;
    CHECK(cf(0.0) == Approx(1.0));
    CHECK(cf(1.375) == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(extract_pnm_core(e, 0.6), DomainError);
    CHECK_THROWS_AS(extract_pnm_core(e, -1.0), DomainError);
  }
  SECTION("quasi-eternal core shifts t0") {
    const Evolution e(QuasiEternalSpec{0.1, 4.0, 0.0}, 100.0);
    const double T = 4.0 - t0_alpha(0.1);
    const auto core = extract_pnm_core(e, T);
    for (double t : {0.5, 2.0, 7.0}) {
      const auto want = e.intermediate_map(T, t + T);
      CHECK((core.dynamical_map(t).matrix() - want->matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto cct = characteristic_times(core, core.horizon());
    CHECK(cct.T.value <= 5e-3);
    CHECK(cct.tau.value == Approx(t0_alpha(0.1)).margin(5e-3));
  }
  SECTION("rate family core wraps V_{t+T,T}") {
    const auto e = preset("pathological", 2.0);
    const auto core = extract_pnm_core(e, 0.3);
    for (double t : {0.1, 0.8}) {
      const auto want = e.intermediate_map(0.3, t + 0.3);
      CHECK((core.dynamical_map(t).matrix() - want->matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("shifted core times") {
  CharTimes ct;
  ct.T = CharTime::at(0.125);
  ct.tau = CharTime::at(0.5);
  ct.t_star = CharTime::at(1.5);
  const auto s = shifted_core_times(ct);
  CHECK(s.T.value == 0.0);
  CHECK(s.tau.value == Approx(0.375));
  CHECK(s.t_star.value == Approx(1.375));
  CHECK(s.classification == Classification::PNM);

  CharTimes zero;
  zero.T = CharTime::at(0.0);
  zero.tau = CharTime::at(0.7);
  zero.t_star = CharTime::beyond_horizon();
  const auto z = shifted_core_times(zero);
  CHECK(z.tau.value == 0.7);
  CHECK_FALSE(z.t_star.finite());

  CharTimes inf;
  CHECK_THROWS_AS(shifted_core_times(inf), DomainError);
}

TEST_CASE("composition rules") {
  SECTION("catalog grids") {
    for (const auto& p : catalog()) {
      INFO(p.name);
      const auto g = scan_regions(preset(p.name), 5.0, 120);
      const auto r = verify_composition_rules(g, 10000, 7);
      CHECK(r.ok());
      CHECK(r.checked > 9000);
    }
  }
  SECTION("markovian grid") {
    const auto g = scan_regions(Evolution(DepolarizingSpec{3, ScalarFn::parse("exp(-t)")}), 5.0, 60);
    CHECK(verify_composition_rules(g, 10000).ok());
  }
  SECTION("rational depolarizing preset against a direct triple check") {
    const auto g = scan_regions(preset("paper-example"), 5.0, 400);
    CHECK(verify_composition_rules(g, 10000).ok());
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 399);
    for (int k = 0; k < 300; ++k) {
      int a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      if (a == b) continue;
      const double s = g.times[static_cast<std::size_t>(a)], t = g.times[static_cast<std::size_t>(b)];
      const double lam = oracle::min_eigenvalue(oracle::choi(2, oracle::depolarizing(2, f_example(t) / f_example(s))));
      CHECK((g.at(a, b).cls == CellClass::NonCptp) == (lam < -1e-9));
    }
  }
  SECTION("alpha = 5: non-CPTP maps compose to CPTP ones") {
    const Evolution e(QuasiEternalSpec{5.0, 0.0, 0.0});
    const auto g = scan_regions(e, 5.0, 120);
    const auto r = verify_composition_rules(g, 10000);
    CHECK(r.ok());
    CHECK(r.non_cptp_pairs_composing_to_cptp > 0);
  }
  SECTION("a corrupted grid is caught") {
    auto g = scan_regions(Evolution(DepolarizingSpec{2, ScalarFn::parse("exp(-t)")}), 5.0, 10);
    for (auto& c : g.cells) {
      if (c.s == 0.0 && c.t > 4.0) c.cls = CellClass::NonCptp;
    }
    CHECK_FALSE(verify_composition_rules(g, 2000).ok());
  }
}

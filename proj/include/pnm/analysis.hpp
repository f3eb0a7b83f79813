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

// Region scans over 0 <= s <= t <= horizon and the characteristic times
//
//   T    largest time before which the evolution is CP-divisible and after
//        which every V_{t,T} is CPTP (Lambda_T non-unitary unless T = 0),
//   tau  onset of non-CPTP infinitesimal maps V_{t+eps,t},
//   t*   earliest final time of a non-CPTP V_{t,T+delta},
//
// with 0 <= T <= tau <= t* <= inf.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pnm/errors.hpp"
#include "pnm/evolutions.hpp"
#include "pnm/linalg.hpp"
#include "pnm/numerics.hpp"

namespace pnm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct AnalysisOptions {
  int grid_points = 400;
  double cptp_tol = 1e-9;
  /// Boundary refinement; tighter than the 1e-4 needed by any consumer.
  double bisect_tol = 1e-9;
  /// Offset of the starting time used for t*.
  double delta = 1e-5;
};

// ---------------------------------------------------------------------------
// Region scan

enum class CellClass { Cptp, NonCptp, Undefined };

inline const char* cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::Cptp: return "CPTP";
    case CellClass::NonCptp: return "NonCPTP";
    case CellClass::Undefined: return "Undefined";
  }
  return "?";
}

struct GridCell {
  double s = 0.0;
  double t = 0.0;
  double value = 0.0;
  CellClass cls = CellClass::Cptp;
  /// No intermediate map exists here; `value` is the regularized l_{t,s}.
  bool undefined = false;
};

struct CptpGrid {
  double horizon = 0.0;
  int n = 0;
  double tol = 0.0;
  std::vector<double> times;
  /// Row-major over s (outer) and t >= s (inner).
  std::vector<GridCell> cells;

  std::size_t index(int i, int j) const {
    if (i < 0 || j < i || j >= n) throw DomainError("grid index out of range");
    const auto ii = static_cast<std::size_t>(i);
    return ii * static_cast<std::size_t>(n) - ii * (ii - 1) / 2 + static_cast<std::size_t>(j - i);
  }
  const GridCell& at(int i, int j) const { return cells[index(i, j)]; }

  /// Cell with the smallest finite value.
  const GridCell& minimum() const {
    const GridCell* best = nullptr;
    for (const auto& c : cells) {
      if (std::isfinite(c.value) && (!best || c.value < best->value)) best = &c;
    }
    if (!best) throw NonFiniteResult("grid has no finite cell");
    return *best;
  }

  std::size_t count(CellClass c) const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [c](const GridCell& g) { return g.cls == c; }));
  }
};

inline CellClass classify_cell(const CellSample& c, double tol) {
  if (!std::isfinite(c.value)) return CellClass::Undefined;
  if (c.value < -tol) return CellClass::NonCptp;
  return c.undefined ? CellClass::Undefined : CellClass::Cptp;
}

inline CptpGrid scan_regions(const Evolution& e, double horizon, int n, double tol = 1e-9) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (n < 2) throw DomainError("grid needs at least two points");
  CptpGrid g;
  g.horizon = horizon;
  g.n = n;
  g.tol = tol;
  g.times = uniform_grid(0.0, horizon, n);
  g.cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    const std::span<const double> row(g.times.data() + i, g.times.size() - static_cast<std::size_t>(i));
    const auto vals = e.row_values(g.times[static_cast<std::size_t>(i)], row);
    for (std::size_t k = 0; k < row.size(); ++k) {
      GridCell c{row[0], row[k], vals[k].value, CellClass::Cptp, vals[k].undefined};
      c.cls = k == 0 ? CellClass::Cptp : classify_cell(vals[k], tol);
      if (k == 0) c.value = 0.0;
      g.cells.push_back(c);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Characteristic times

struct CharTime {
  double value = kInf;
  /// Infinite only as far as the horizon could tell.
  bool horizon_limited = false;

  bool finite() const noexcept { return std::isfinite(value); }
  static CharTime at(double v) { return {v, false}; }
  static CharTime beyond_horizon() { return {kInf, true}; }
};

enum class Classification { Markovian, NNM, PNM, UnitaryTrivial };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Markovian: return "Markovian";
    case Classification::NNM: return "NNM";
    case Classification::PNM: return "PNM";
    case Classification::UnitaryTrivial: return "UnitaryTrivial";
  }
  return "?";
}

struct CharTimes {
  CharTime T;
  CharTime tau;
  CharTime t_star;
  Classification classification = Classification::Markovian;
  /// Largest T satisfying the divisibility conditions before the
  /// non-unitarity requirement is applied; t* is measured from here.
  double T_divisible = kInf;
};

namespace detail {

/// Smallest cell value of row s over [s, horizon]: the grid points above s,
/// with the lowest near-zero local minima polished by Brent's method.
inline double row_minimum(const Evolution& e, double s, const std::vector<double>& grid,
                          double tol) {
  std::vector<double> ts{s};
  for (double t : grid) {
    if (t > s) ts.push_back(t);
  }
  if (ts.size() < 2) return 0.0;
  const auto vals = e.row_values(s, ts);
  std::vector<double> v(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) {
    v[k] = std::isfinite(vals[k].value) ? vals[k].value : kInf;
  }
  double best = *std::min_element(v.begin() + 1, v.end());
  if (best < -tol) return best;

  std::vector<std::size_t> minima;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] <= v[k - 1] && v[k] <= v[k + 1] && v[k] < 1e-3) minima.push_back(k);
  }
  std::sort(minima.begin(), minima.end(), [&v](auto a, auto b) { return v[a] < v[b]; });
  if (minima.size() > 3) minima.resize(3);
  for (std::size_t k : minima) {
    const auto m = brent_minimize(
        [&](double x) {
          const double c = e.cell_value(s, x).value;
          return std::isfinite(c) ? c : kInf;
        },
        ts[k - 1], ts[k + 1], 52);
    best = std::min(best, m.value);
    if (best < -tol) break;
  }
  return best;
}

inline double snap_zero(double x, double tol) { return x < 2.0 * tol ? 0.0 : x; }

}  // namespace detail

/// tau: earliest time whose infinitesimal intermediate map is non-CPTP.
inline CharTime compute_tau_lambda(const Evolution& e, double horizon,
                                   const AnalysisOptions& opt = {}) {
  const auto grid = uniform_grid(0.0, horizon, opt.grid_points);
  const double eps = grid[1] - grid[0];
  auto non_cptp = [&](double t) {
    return e.infinitesimal_class(t, eps) == InfinitesimalClass::NonCptp;
  };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!non_cptp(grid[k])) continue;
    if (k == 0) return CharTime::at(0.0);
    const double t = bisect_predicate([&](double x) { return !non_cptp(x); }, grid[k - 1],
                                      grid[k], opt.bisect_tol);
    return CharTime::at(detail::snap_zero(t, opt.bisect_tol));
  }
  return CharTime::beyond_horizon();
}

struct TLambdaResult {
  CharTime T;
  /// Before condition (C): the largest divisibility time.
  double T_divisible = kInf;
};

/// T: conditions (A) and (B) via a row scan over s, then condition (C).
inline TLambdaResult compute_T_lambda_detailed(const Evolution& e, double horizon,
                                               const AnalysisOptions& opt = {}) {
  const auto grid = uniform_grid(0.0, horizon, opt.grid_points);
  const double s_limit = e.divisibility_horizon().value_or(kInf);
  auto holds = [&](double s) { return detail::row_minimum(e, s, grid, opt.cptp_tol) >= -opt.cptp_tol; };

  double T_b = kInf;
  bool bounded = false;
  for (std::size_t k = 0; k < grid.size() && grid[k] < s_limit; ++k) {
    if (holds(grid[k])) continue;
    T_b = k == 0 ? 0.0 : bisect_predicate(holds, grid[k - 1], grid[k], opt.bisect_tol);
    bounded = true;
    break;
  }
  if (!bounded && std::isfinite(s_limit)) T_b = s_limit;

  const CharTime tau = compute_tau_lambda(e, horizon, opt);
  double T_ab = std::min(T_b, tau.value);
  if (!std::isfinite(T_ab)) return {CharTime::beyond_horizon(), kInf};
  T_ab = detail::snap_zero(T_ab, opt.bisect_tol);

  // Condition (C): Lambda_T must not be unitary, with T = 0 always admissible.
  if (T_ab > 0.0 && is_unitary_map(e.dynamical_map(T_ab))) return {CharTime::at(0.0), T_ab};
  return {CharTime::at(T_ab), T_ab};
}

inline CharTime compute_T_lambda(const Evolution& e, double horizon,
                                 const AnalysisOptions& opt = {}) {
  return compute_T_lambda_detailed(e, horizon, opt).T;
}

namespace detail {

// Depolarizing families: the first return of f to f(T). The return is
// usually tangent (f has a local maximum equal to f(T)), so the level is
// lowered by eta and grid-level maxima are polished before comparing.
inline CharTime depolarizing_t_star(const DepolarizingSpec& d, double T, double horizon,
                                    const AnalysisOptions& opt) {
  const double fT = d.f.eval_finite(T);
  const double eta = 10.0 * d.dim * d.dim * opt.cptp_tol;
  const double level = fT - eta;
  auto above = [&](double t) { return d.f(t) >= level; };

  const auto grid = uniform_grid(0.0, horizon, opt.grid_points);
  // Leave the level set first.
  double start = T + opt.delta;
  while (start < horizon && above(start)) start += opt.delta;
  if (start >= horizon) return CharTime::beyond_horizon();

  std::vector<double> ts{start};
  for (double t : grid) {
    if (t > start) ts.push_back(t);
  }
  // A maximum within eta of f(T) is a tangent return: t* is the maximum
  // itself, not the crossing of the lowered level just before it.
  const auto local_max = [&](std::size_t k) {
    const double lo = ts[k - 1];
    const double hi = k + 1 < ts.size() ? ts[k + 1] : ts[k];
    return brent_minimize([&](double x) { return -d.f(x); }, lo, hi, 52);
  };
  const auto crossing = [&](double lo, double hi) {
    return CharTime::at(bisect_predicate([&](double x) { return !above(x); }, lo, hi, opt.bisect_tol));
  };
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const bool peak = k + 1 < ts.size() && d.f(ts[k]) >= d.f(ts[k - 1]) && d.f(ts[k]) >= d.f(ts[k + 1]);
    if (above(ts[k])) {
      if (d.f(ts[k]) < fT + eta) {
        const auto m = local_max(k);
        if (-m.value < fT + eta && !above(ts[k - 1])) return CharTime::at(m.x);
      }
      return crossing(ts[k - 1], ts[k]);
    }
    if (peak) {
      const auto m = local_max(k);
      if (-m.value >= level) {
        if (-m.value < fT + eta) return CharTime::at(m.x);
        return crossing(ts[k - 1], m.x);
      }
    }
  }
  return CharTime::beyond_horizon();
}

}  // namespace detail

/// t*: earliest t with V_{t, T+delta} non-CPTP, T the divisibility time.
inline CharTime compute_t_star(const Evolution& e, double horizon, double T_divisible,
                               const AnalysisOptions& opt = {}) {
  if (!std::isfinite(T_divisible)) return CharTime::beyond_horizon();
  // Non-CPTP infinitesimal maps right after T: V_{T+delta+eps, T+delta}
  // fails for arbitrarily small eps, so t* -> T as delta -> 0.
  const auto grid_step = horizon / (opt.grid_points - 1);
  if (e.infinitesimal_class(T_divisible + opt.delta, grid_step) == InfinitesimalClass::NonCptp) {
    return CharTime::at(T_divisible);
  }
  if (auto* d = std::get_if<DepolarizingSpec>(&e.spec())) {
    return detail::depolarizing_t_star(*d, T_divisible, horizon, opt);
  }
  const double s0 = T_divisible + opt.delta;
  auto cptp = [&](double t) {
    const double v = e.cell_value(s0, t).value;
    return !(v < -opt.cptp_tol);
  };
  const auto grid = uniform_grid(0.0, horizon, opt.grid_points);
  std::vector<double> ts{s0};
  for (double t : grid) {
    if (t > s0) ts.push_back(t);
  }
  const auto vals = e.row_values(s0, ts);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double v = vals[k].value;
    if (v < -opt.cptp_tol) {
      return CharTime::at(bisect_predicate(cptp, ts[k - 1], ts[k], opt.bisect_tol));
    }
    if (k + 1 < ts.size() && v <= vals[k - 1].value && v <= vals[k + 1].value && v < 1e-3) {
      const auto m = brent_minimize([&](double x) { return e.cell_value(s0, x).value; }, ts[k - 1],
                                    ts[k + 1], 52);
      if (m.value < -opt.cptp_tol) {
        return CharTime::at(bisect_predicate(cptp, ts[k - 1], m.x, opt.bisect_tol));
      }
    }
  }
  return CharTime::beyond_horizon();
}

inline Classification classify_evolution(const CharTimes& ct, const Evolution& e, double horizon,
                                         const AnalysisOptions& opt = {}) {
  bool all_unitary = true;
  for (double t : uniform_grid(0.0, horizon, 33)) {
    if (!is_unitary_map(e.dynamical_map(t))) {
      all_unitary = false;
      break;
    }
  }
  if (all_unitary) return Classification::UnitaryTrivial;
  if (!ct.T.finite()) return Classification::Markovian;
  const bool non_markovian = ct.tau.finite() || ct.t_star.finite();
  if (ct.T.value <= 10.0 * opt.bisect_tol) {
    return non_markovian ? Classification::PNM : Classification::Markovian;
  }
  return Classification::NNM;
}

inline CharTimes characteristic_times(const Evolution& e, double horizon,
                                      const AnalysisOptions& opt = {}) {
  CharTimes ct;
  const auto tr = compute_T_lambda_detailed(e, horizon, opt);
  ct.T = tr.T;
  ct.T_divisible = tr.T_divisible;
  ct.tau = compute_tau_lambda(e, horizon, opt);
  ct.t_star = compute_t_star(e, horizon, tr.T_divisible, opt);
  ct.classification = classify_evolution(ct, e, horizon, opt);
  return ct;
}

// ---------------------------------------------------------------------------
// PNM core

/// Lambda-bar_t = V_{t+T, T} as a first-class evolution.
inline Evolution extract_pnm_core(const Evolution& e, double T) {
  if (!std::isfinite(T) || T < 0.0) throw DomainError("core shift must be finite and non-negative");
  if (T == 0.0) return e;
  if (auto nb = e.non_bijective_time(); nb && T >= *nb) {
    throw DomainError("no intermediate maps from T = " + detail::format_number(T) +
                      " (at or beyond the non-bijective time)");
  }
  const double horizon = std::max(e.horizon() - T, 1e-3);
  return std::visit(
      [&](const auto& sp) -> Evolution {
        using S = std::decay_t<decltype(sp)>;
        if constexpr (std::is_same_v<S, DepolarizingSpec>) {
          const double fT = sp.f.eval_finite(T);
          return Evolution(DepolarizingSpec{sp.dim, sp.f.shifted(T).scaled(1.0 / fT)}, horizon);
        } else if constexpr (std::is_same_v<S, QuasiEternalSpec>) {
          QuasiEternalSpec q = sp;
          if (T <= q.t_unitary) {
            q.t_unitary -= T;
          } else {
            q.t0 -= T - q.t_unitary;
            q.t_unitary = 0.0;
          }
          return Evolution(q, horizon);
        } else if constexpr (std::is_same_v<S, PauliRatesSpec>) {
          return Evolution(PauliRatesSpec{sp.gx.shifted(T), sp.gy.shifted(T), sp.gz.shifted(T)},
                           horizon);
        } else if constexpr (std::is_same_v<S, ShiftedSpec>) {
          return Evolution(ShiftedSpec{sp.parent, sp.shift + T}, horizon);
        } else {
          return Evolution(ShiftedSpec{std::make_shared<const Evolution>(e), T}, horizon);
        }
      },
      e.spec());
}

/// Times of the core from those of the parent: (0, tau - T, t* - T).
inline CharTimes shifted_core_times(const CharTimes& ct) {
  if (!ct.T.finite()) throw DomainError("core times need a finite T");
  const double T = ct.T.value;
  if (T == 0.0) return ct;
  CharTimes out = ct;
  out.T = CharTime::at(0.0);
  out.T_divisible = 0.0;
  out.tau = ct.tau.finite() ? CharTime::at(ct.tau.value - T) : ct.tau;
  out.t_star = ct.t_star.finite() ? CharTime::at(ct.t_star.value - T) : ct.t_star;
  out.classification = Classification::PNM;
  return out;
}

// ---------------------------------------------------------------------------
// Composition rules

struct CompositionViolation {
  double t1, t2, t3;
  std::string rule;
};

struct CompositionCheck {
  std::vector<CompositionViolation> violations;
  std::size_t checked = 0;
  /// Triples where two non-CPTP maps compose to a CPTP one (allowed).
  std::size_t non_cptp_pairs_composing_to_cptp = 0;

  bool ok() const noexcept { return violations.empty(); }
};

/// Samples t1 < t2 < t3 on the grid and checks
///   (i)   V21, V32 CPTP          => V31 CPTP
///   (ii)  V31 non-CPTP, V21 CPTP => V32 non-CPTP
///   (iii) V31 non-CPTP, V32 CPTP => V21 non-CPTP
/// On classified cells the three rules fail on exactly the same triples, so
/// each offending triple is reported once.
inline CompositionCheck verify_composition_rules(const CptpGrid& grid, int samples,
                                                 std::uint64_t seed = 1) {
  CompositionCheck out;
  if (grid.n < 3) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, grid.n - 1);
  for (int k = 0; k < samples; ++k) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) {
      --k;
      continue;
    }
    int idx[3] = {a, b, c};
    std::sort(idx, idx + 3);
    const auto& v21 = grid.at(idx[0], idx[1]);
    const auto& v32 = grid.at(idx[1], idx[2]);
    const auto& v31 = grid.at(idx[0], idx[2]);
    if (v21.cls == CellClass::Undefined || v32.cls == CellClass::Undefined ||
        v31.cls == CellClass::Undefined) {
      continue;
    }
    ++out.checked;
    const bool c21 = v21.cls == CellClass::Cptp;
    const bool c32 = v32.cls == CellClass::Cptp;
    const bool c31 = v31.cls == CellClass::Cptp;
    const double t1 = grid.times[static_cast<std::size_t>(idx[0])];
    const double t2 = grid.times[static_cast<std::size_t>(idx[1])];
    const double t3 = grid.times[static_cast<std::size_t>(idx[2])];
    if (c21 && c32 && !c31) out.violations.push_back({t1, t2, t3, "i-iii"});
    if (!c21 && !c32 && c31) ++out.non_cptp_pairs_composing_to_cptp;
  }
  return out;
}

}  // namespace pnm

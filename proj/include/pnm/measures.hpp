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

// Distinguishability, information flux and the non-Markovianity measures
// built on it, plus entanglement-breaking times of qubit evolutions.
//
// All flux measures are evaluated for explicit ancilla-free state pairs; for
// depolarizing evolutions every orthogonal pair is optimal, elsewhere the
// values are lower bounds on the optimized measures.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pnm/analysis.hpp"
#include "pnm/errors.hpp"
#include "pnm/evolutions.hpp"
#include "pnm/linalg.hpp"
#include "pnm/numerics.hpp"

namespace pnm {

struct StatePair {
  StatePair(DensityMatrix a, DensityMatrix b) : rho1(std::move(a)), rho2(std::move(b)) {
    if (rho1.dim() != rho2.dim()) throw DimensionMismatch("state pair dimensions differ");
  }

  /// |0><0| and |1><1| in dimension d.
  static StatePair orthogonal_basis(int d = 2) {
    return {DensityMatrix::basis(d, 0), DensityMatrix::basis(d, 1)};
  }

  int dim() const { return rho1.dim(); }
  CMatrix difference() const { return rho1.matrix() - rho2.matrix(); }

  DensityMatrix rho1;
  DensityMatrix rho2;
};

inline double distinguishability(const StatePair& p) { return trace_norm(p.difference()); }

inline double guessing_probability(const StatePair& p) {
  return (2.0 + distinguishability(p)) / 4.0;
}

/// Distinguishability of the pair after Lambda_t.
inline double evolved_distinguishability(const Evolution& e, const StatePair& p, double t) {
  return trace_norm(apply_map(e.dynamical_map(t), p.difference()));
}

// ---------------------------------------------------------------------------
// Flux

struct FluxSeries {
  std::vector<double> times;
  std::vector<double> W;
  /// Forward differences, one shorter than W.
  std::vector<double> sigma;
};

inline FluxSeries flux_series(const Evolution& e, const StatePair& p, double horizon, int n) {
  if (n < 2) throw DomainError("flux series needs at least two points");
  if (p.dim() != e.dim()) throw DimensionMismatch("state pair and evolution dimensions differ");
  FluxSeries fs;
  fs.times = uniform_grid(0.0, horizon, n);
  const CMatrix diff = p.difference();
  fs.W.reserve(fs.times.size());
  for (double t : fs.times) fs.W.push_back(trace_norm(apply_map(e.dynamical_map(t), diff)));
  const double step = fs.times[1] - fs.times[0];
  for (std::size_t k = 0; k + 1 < fs.W.size(); ++k) fs.sigma.push_back((fs.W[k + 1] - fs.W[k]) / step);
  return fs;
}

struct FluxMeasures {
  double M_W = 0.0;
  double M_W_max = 0.0;
  double M_W_av = 0.0;
};

inline FluxMeasures integrate_flux_measures(const FluxSeries& fs) {
  FluxMeasures m;
  if (fs.W.empty()) return m;
  double lowest = fs.W[0];
  double area = 0.0;
  for (std::size_t k = 1; k < fs.W.size(); ++k) {
    const double inc = fs.W[k] - fs.W[k - 1];
    if (inc > 0.0) m.M_W += inc;
    m.M_W_max = std::max(m.M_W_max, fs.W[k] - lowest);
    lowest = std::min(lowest, fs.W[k]);
    const double dt = fs.times[k] - fs.times[k - 1];
    area += 0.5 * dt * (fs.W[k] + fs.W[k - 1]);
    const double mean = area / (fs.times[k] - fs.times[0]);
    m.M_W_av = std::max(m.M_W_av, fs.W[k] - mean);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Revivals of a characteristic function

struct TimeInterval {
  double begin;
  double end;
};

/// Maximal intervals of [0, horizon] on which f increases, located by the
/// sign of f' on a grid and refined by bisection.
inline std::vector<TimeInterval> increase_intervals(const ScalarFn& f, double horizon, int n) {
  auto rising = [&f](double t) { return Evolution::depolarizing_slope(f, t) > 0.0; };
  const auto ts = uniform_grid(0.0, horizon, n);
  const double tol = 1e-12;
  std::vector<TimeInterval> out;
  bool up = rising(ts[0]);
  double begin = 0.0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const bool now = rising(ts[k]);
    if (now == up) continue;
    if (now) {
      begin = bisect_predicate([&](double x) { return !rising(x); }, ts[k - 1], ts[k], tol);
    } else {
      out.push_back({begin, bisect_predicate(rising, ts[k - 1], ts[k], tol)});
    }
    up = now;
  }
  if (up) out.push_back({begin, horizon});
  return out;
}

/// Total revival: sum of f(end) - f(begin) over the increase intervals.
inline double revivals_delta(const ScalarFn& f, double horizon, int n = 400) {
  double delta = 0.0;
  for (const auto& iv : increase_intervals(f, horizon, n)) {
    delta += std::max(0.0, f.eval_finite(iv.end) - f.eval_finite(iv.begin));
  }
  return delta;
}

struct DepolarizingMeasures {
  double M_D = 0.0;
  double M_D_core = 0.0;
  double M_mix = 0.0;
  double M_mix_core = 0.0;
};

inline DepolarizingMeasures depolarizing_measures(double delta, double f_at_T) {
  if (!(f_at_T > 0.0)) throw DomainError("f(T) must be positive");
  if (delta < 0.0) throw DomainError("total revival must be non-negative");
  return {2.0 * delta, 2.0 * delta / f_at_T, delta / (1.0 + delta), delta / (f_at_T + delta)};
}

// ---------------------------------------------------------------------------
// Orthogonal pairs

/// Splits a traceless hermitian operator into orthogonal states rho1, rho2
/// with rho1 - rho2 proportional to it and trace distance 2.
inline StatePair orthogonal_pair_from_difference(const CMatrix& delta) {
  const double tol = Tolerances{}.hermiticity;
  if (delta.rows() != delta.cols()) throw DimensionMismatch("operator must be square");
  if (detail::max_abs(delta - delta.adjoint()) > tol) throw NotHermitian("operator is not hermitian");
  if (std::abs(delta.trace()) > tol) throw DomainError("operator must be traceless");
  const CMatrix h = (delta + delta.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const RVector& ev = es.eigenvalues();
  const double norm = ev.cwiseAbs().sum();
  if (norm < 1e-12) throw ZeroDifference("operator is zero");
  const int d = static_cast<int>(h.rows());
  CMatrix pos = CMatrix::Zero(d, d);
  CMatrix neg = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double l = 2.0 * ev(i) / norm;
    const CVector& v = es.eigenvectors().col(i);
    if (l > 0.0) pos += l * v * v.adjoint();
    if (l < 0.0) neg -= l * v * v.adjoint();
  }
  // Absorb the residual trace error so both matrices pass validation.
  pos /= pos.trace().real();
  neg /= neg.trace().real();
  return {DensityMatrix(pos), DensityMatrix(neg)};
}

/// 2 / ||Lambda_T(rho1) - Lambda_T(rho2)||_1: backflow gain of the core.
inline double amplification_factor(const Evolution& e, const StatePair& p, double T) {
  if (std::abs(distinguishability(p) - 2.0) > 1e-9) throw DomainError("pair is not orthogonal");
  const double d = evolved_distinguishability(e, p, T);
  if (d < 1e-12) throw DegeneratePair("evolved pair is indistinguishable at T");
  return 2.0 / d;
}

// ---------------------------------------------------------------------------
// RHP measure: integral over time of (||J(V_{t+dt,t})||_1 - 1)/dt

struct RhpResult {
  double value = 0.0;
  /// An increase interval starts from f = 0, so the integral diverges.
  bool divergent = false;
  /// Change between the last two extrapolated grid sums of the fallback
  /// (0 for closed forms).
  double drift = 0.0;
  bool converged = true;
  std::size_t skipped_undefined = 0;
};

namespace detail {

inline double choi_excess(const Superoperator& v) {
  return trace_norm(choi_of(v).matrix()) - 1.0;
}

inline RhpResult rhp_grid_sum(const Evolution& e, double horizon, int n) {
  RhpResult r;
  const auto ts = uniform_grid(0.0, horizon, n);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const auto v = e.intermediate_map(ts[k], ts[k + 1]);
    if (!v) {
      ++r.skipped_undefined;
      continue;
    }
    r.value += std::max(0.0, choi_excess(*v));
  }
  return r;
}

}  // namespace detail

inline RhpResult rhp_measure(const Evolution& e, double horizon, int n = 400) {
  if (!(horizon > 0.0) || n < 2) throw DomainError("rhp needs a positive horizon and n >= 2");
  RhpResult r;
  if (auto* d = std::get_if<DepolarizingSpec>(&e.spec())) {
    // ||J(V_{t+dt,t})||_1 - 1 = 2 (d^2-1)/d^2 max(0, f'/f) dt.
    const double d2 = static_cast<double>(d->dim * d->dim);
    for (const auto& iv : increase_intervals(d->f, horizon, n)) {
      const double lo = d->f.eval_finite(iv.begin);
      const double hi = d->f.eval_finite(iv.end);
      if (lo <= Evolution::kZeroTol) {
        r.divergent = true;
        r.value = kInf;
        return r;
      }
      r.value += 2.0 * (d2 - 1.0) / d2 * std::log(hi / lo);
    }
    return r;
  }
  if (e.rate_driven()) {
    // Pauli weights of V_{t+dt,t} are gamma_i dt, so the excess is
    // 2 sum_i max(0, -gamma_i) dt.
    auto g = [&e](double t) {
      const auto rates = e.rates(t);
      double s = 0.0;
      for (double x : rates) s += std::max(0.0, -x);
      return 2.0 * s;
    };
    const auto ts = uniform_grid(0.0, horizon, n);
    QuadratureOptions q;
    q.abs_tol = 1e-10;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      r.value += adaptive_simpson(g, ts[k], ts[k + 1], q).value;
    }
    return r;
  }
  // The grid sum carries an O(step) bias, so successive halvings are
  // Richardson-extrapolated and refined until two extrapolants agree.
  RhpResult coarse = detail::rhp_grid_sum(e, horizon, n);
  double previous = kInf;
  for (int level = 0; level < 6; ++level) {
    n = 2 * n - 1;
    RhpResult fine = detail::rhp_grid_sum(e, horizon, n);
    const double extrapolated = 2.0 * fine.value - coarse.value;
    r = fine;
    r.value = std::max(0.0, extrapolated);
    r.drift = std::abs(extrapolated - previous);
    r.converged = r.drift < 1e-4;
    if (r.converged) break;
    previous = extrapolated;
    coarse = fine;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Entanglement breaking

struct EbResult {
  /// Onset after which every sampled Lambda_t is entanglement breaking.
  std::optional<double> time;
  bool horizon_limited = true;
};

inline EbResult eb_time_qubit(const Evolution& e, double horizon, int n = 400,
                              double tol = 1e-12) {
  if (e.dim() != 2) throw UnsupportedDimension("entanglement-breaking times need a qubit");
  const auto ts = uniform_grid(0.0, horizon, n);
  auto eb = [&e](double t) { return is_eb_qubit(e.dynamical_map(t)); };
  std::vector<bool> flags(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) flags[k] = eb(ts[k]);
  std::size_t k = ts.size();
  while (k > 0 && flags[k - 1]) --k;
  EbResult r;
  if (k == ts.size()) return r;
  if (k == 0) {
    r.time = 0.0;
    return r;
  }
  r.time = bisect_predicate([&](double t) { return !eb(t); }, ts[k - 1], ts[k], tol);
  return r;
}

// ---------------------------------------------------------------------------
// Aggregate

struct MeasureReport {
  double delta = 0.0;
  double delta_core = 0.0;
  DepolarizingMeasures depolarizing;
  FluxMeasures flux;
  FluxMeasures flux_core;
  RhpResult rhp;
  RhpResult rhp_core;
  std::optional<double> amplification;
  EbResult eb;
  /// Flux values are for a fixed pair, not optimized over states.
  bool lower_bounds = true;
};

}  // namespace pnm

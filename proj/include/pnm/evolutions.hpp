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

// One-parameter families of dynamical maps Lambda_t and their intermediate
// maps V_{t,s} (Lambda_t = V_{t,s} o Lambda_s).
//
// Supported families:
//  * depolarizing   Lambda_t(X) = f(t) X + (1 - f(t)) tr(X) 1/d
//  * Pauli (qubit)  Lambda_t(X) = sum_i p_i(t) sigma_i X sigma_i, given either
//                   by the probabilities or by the rates of the master equation
//                   d rho/dt = sum_i gamma_i(t) (sigma_i rho sigma_i - rho)
//  * quasi-eternal  the Pauli family with gamma = alpha/2 {1, 1, -tanh(t - t0)},
//                   optionally preceded by an identity interval [0, t_U]
//  * shifted        Lambda'_t = V_{t+T, T} of another evolution

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pnm/errors.hpp"
#include "pnm/expr.hpp"
#include "pnm/linalg.hpp"
#include "pnm/numerics.hpp"

namespace pnm {

class Evolution;

struct DepolarizingSpec {
  int dim = 2;
  ScalarFn f;
};

struct PauliProbsSpec {
  ScalarFn px, py, pz;
};

struct PauliRatesSpec {
  ScalarFn gx, gy, gz;
};

struct QuasiEternalSpec {
  double alpha = 1.0;
  double t0 = 0.0;
  double t_unitary = 0.0;
};

struct ShiftedSpec {
  std::shared_ptr<const Evolution> parent;
  double shift = 0.0;
};

using EvolutionSpec =
    std::variant<DepolarizingSpec, PauliProbsSpec, PauliRatesSpec, QuasiEternalSpec, ShiftedSpec>;

enum class Family { Depolarizing, PauliProbs, PauliRates, QuasiEternal, Shifted };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Depolarizing: return "depolarizing";
    case Family::PauliProbs: return "pauliProbs";
    case Family::PauliRates: return "pauliRates";
    case Family::QuasiEternal: return "quasiEternal";
    case Family::Shifted: return "shifted";
  }
  return "?";
}

/// Smallest Choi eigenvalue of V_{t,s}, or the regularized value
/// l_{t,s} = (f(s) - f(t))/d^2 for non-bijective depolarizing evolutions.
/// `undefined` marks cells where no intermediate map exists (f(s) = 0).
struct CellSample {
  double value = 0.0;
  bool undefined = false;
};

enum class InfinitesimalClass { Cptp, NonCptp, Indeterminate };

/// Pauli weights {p_0, p_x, p_y, p_z}.
using PauliProbs = std::array<double, 4>;
/// Bloch-vector scalings {lambda_x, lambda_y, lambda_z}.
using PauliEigen = std::array<double, 3>;

inline PauliProbs pauli_probs_from_eigen(const PauliEigen& l) {
  return {(1.0 + l[0] + l[1] + l[2]) / 4.0, (1.0 + l[0] - l[1] - l[2]) / 4.0,
          (1.0 - l[0] + l[1] - l[2]) / 4.0, (1.0 - l[0] - l[1] + l[2]) / 4.0};
}

inline PauliEigen pauli_eigen_from_probs(const PauliProbs& p) {
  return {p[0] + p[1] - p[2] - p[3], p[0] - p[1] + p[2] - p[3], p[0] - p[1] - p[2] + p[3]};
}

inline double min_prob(const PauliProbs& p) { return *std::min_element(p.begin(), p.end()); }

// ---------------------------------------------------------------------------
// Quasi-eternal model

/// Smallest t0 for which the quasi-eternal maps are CPTP at all times.
inline double t0_alpha(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  return std::max(0.0, std::log(std::pow(2.0, 1.0 / alpha) - 1.0) / 2.0);
}

namespace detail {

inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace detail

/// Weights of the quasi-eternal intermediate map V_{t,s}; s = 0 gives Lambda_t.
inline PauliProbs quasi_eternal_probs(double alpha, double t0, double s, double t) {
  const double x = t - s;
  const double e1 = std::exp(-alpha * x);
  const double e2 = e1 * e1;
  const double ratio = std::exp(alpha * (detail::log_cosh(t - t0) - detail::log_cosh(s - t0)));
  const double px = (1.0 - e2) / 4.0;
  const double pz = (1.0 + e2 - 2.0 * e1 * ratio) / 4.0;
  return {1.0 - 2.0 * px - pz, px, px, pz};
}

inline std::array<double, 3> quasi_eternal_rates(double alpha, double t0, double t) {
  return {alpha / 2.0, alpha / 2.0, -alpha / 2.0 * std::tanh(t - t0)};
}

// ---------------------------------------------------------------------------
// Rate integration

namespace detail {

inline QuadratureOptions rate_quadrature() {
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  o.max_depth = 40;
  return o;
}

inline double integrate_rate(const ScalarFn& g, double a, double b) {
  return adaptive_simpson([&g](double x) { return g(x); }, a, b, rate_quadrature()).value;
}

/// Rates may oscillate without bound near t = 0 (sin(1/t)-like), where Simpson
/// converges falsely. Below this anchor integrals run over dyadic pieces with
/// Gauss-Kronrod instead.
inline constexpr double kRateAnchor = 0.01;
inline constexpr double kRateFloor = 1e-6;

inline double integrate_rate_piece(const ScalarFn& g, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&g](double x) { return g(x); }, a, b, 12, 1e-12);
}

/// Cumulative integrals of a rate on the dyadic nodes kRateAnchor / 2^k.
struct RateTable {
  std::vector<double> nodes;  // descending, nodes.back() < kRateFloor
  std::vector<double> cum;    // integral over [0, nodes[k]]

  explicit RateTable(const ScalarFn& g) {
    std::vector<double> pieces;
    for (double hi = kRateAnchor; hi >= kRateFloor; hi *= 0.5) {
      nodes.push_back(hi);
      pieces.push_back(integrate_rate_piece(g, 0.5 * hi, hi));
    }
    const double last = 0.5 * nodes.back();
    const double mid = g(0.5 * last);
    double acc = std::isfinite(mid) ? last * mid : 0.0;
    nodes.push_back(last);
    cum.assign(nodes.size(), 0.0);
    cum.back() = acc;
    for (std::size_t k = pieces.size(); k-- > 0;) {
      acc += pieces[k];
      cum[k] = acc;
    }
  }

  /// Integral over [0, x].
  double from_zero(const ScalarFn& g, double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= nodes.front()) return cum.front() + integrate_rate(g, nodes.front(), x);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
      if (x >= nodes[k]) return cum[k] + integrate_rate_piece(g, nodes[k], x);
    }
    return cum.back() * (x / nodes.back());
  }

  double between(const ScalarFn& g, double a, double b) const {
    if (a >= kRateAnchor) return integrate_rate(g, a, b);
    return from_zero(g, b) - from_zero(g, a);
  }
};

inline PauliEigen eigen_from_rate_integrals(const std::array<double, 3>& in) {
  return {std::exp(-2.0 * (in[1] + in[2])), std::exp(-2.0 * (in[0] + in[2])),
          std::exp(-2.0 * (in[0] + in[1]))};
}

}  // namespace detail

/// Pauli weights of the map generated by the rates on [s, t].
inline PauliProbs pauli_from_rates(const ScalarFn& gx, const ScalarFn& gy, const ScalarFn& gz,
                                   double s, double t) {
  const auto part = [s, t](const ScalarFn& g) {
    return s >= detail::kRateAnchor ? detail::integrate_rate(g, s, t)
                                    : detail::RateTable(g).between(g, s, t);
  };
  const std::array<double, 3> in{part(gx), part(gy), part(gz)};
  return pauli_probs_from_eigen(detail::eigen_from_rate_integrals(in));
}

inline PauliProbs pauli_from_rates(const ScalarFn& gx, const ScalarFn& gy, const ScalarFn& gz,
                                   double t) {
  return pauli_from_rates(gx, gy, gz, 0.0, t);
}

// ---------------------------------------------------------------------------
// Evolution

class Evolution {
 public:
  static constexpr double kZeroTol = 1e-10;
  static constexpr double kDerivativeTol = 1e-9;
  static constexpr double kRateTol = 1e-12;
  static constexpr double kInf_ = std::numeric_limits<double>::infinity();

  /// `horizon` bounds the search for a zero of a depolarizing f (t^NB).
  explicit Evolution(EvolutionSpec spec, double horizon = 5.0)
      : spec_(std::move(spec)), horizon_(horizon) {
    if (auto* d = std::get_if<DepolarizingSpec>(&spec_)) {
      if (d->dim < 2) throw DomainError("depolarizing dimension must be at least 2");
      t_nb_ = find_first_zero(d->f, horizon_);
    } else if (auto* q = std::get_if<QuasiEternalSpec>(&spec_)) {
      if (!(q->alpha > 0.0)) throw DomainError("alpha must be positive");
      if (q->t_unitary < 0.0) throw DomainError("unitary prefix must be non-negative");
    } else if (auto* r = std::get_if<PauliRatesSpec>(&spec_)) {
      rate_tables_ = std::make_shared<const std::array<detail::RateTable, 3>>(
          std::array<detail::RateTable, 3>{detail::RateTable(r->gx), detail::RateTable(r->gy),
                                           detail::RateTable(r->gz)});
    } else if (auto* sh = std::get_if<ShiftedSpec>(&spec_)) {
      if (!sh->parent) throw DomainError("shifted evolution without parent");
      if (auto nb = sh->parent->non_bijective_time(); nb && *nb >= sh->shift) {
        t_nb_ = *nb - sh->shift;
      }
    }
  }

  const EvolutionSpec& spec() const noexcept { return spec_; }
  Family family() const noexcept { return static_cast<Family>(spec_.index()); }
  double horizon() const noexcept { return horizon_; }

  int dim() const {
    if (auto* d = std::get_if<DepolarizingSpec>(&spec_)) return d->dim;
    if (auto* sh = std::get_if<ShiftedSpec>(&spec_)) return sh->parent->dim();
    return 2;
  }

  /// Earliest zero of a depolarizing characteristic function, if any.
  std::optional<double> non_bijective_time() const { return t_nb_; }

  /// Intermediate maps V_{t,s} exist for every s below this time.
  std::optional<double> divisibility_horizon() const { return t_nb_; }

  /// Closed-form intermediate maps and regularized cell values apply.
  bool regularized() const noexcept { return t_nb_.has_value() && family() == Family::Depolarizing; }

  /// Master-equation rates are known, so sign(min gamma) classifies V_{t+eps,t}.
  bool rate_driven() const {
    if (family() == Family::PauliRates || family() == Family::QuasiEternal) return true;
    if (auto* sh = std::get_if<ShiftedSpec>(&spec_)) return sh->parent->rate_driven();
    return false;
  }

  Superoperator dynamical_map(double t) const {
    if (t < 0.0) throw DomainError("time must be non-negative");
    return std::visit([&](const auto& s) { return dynamical_map_impl(s, t); }, spec_);
  }

  /// V_{t,s}; nullopt when it does not exist (depolarizing with f(s) = 0).
  std::optional<Superoperator> intermediate_map(double s, double t) const {
    if (s < 0.0 || t < s) throw DomainError("intermediate map requires 0 <= s <= t");
    return std::visit([&](const auto& sp) { return intermediate_impl(sp, s, t); }, spec_);
  }

  CellSample cell_value(double s, double t) const {
    return std::visit([&](const auto& sp) { return cell_impl(sp, s, t); }, spec_);
  }

  /// cell_value(s, t) for every t in `ts` (ascending, all >= s).
  std::vector<CellSample> row_values(double s, std::span<const double> ts) const {
    std::vector<CellSample> out;
    out.reserve(ts.size());
    if (auto* r = std::get_if<PauliRatesSpec>(&spec_)) {
      std::array<double, 3> acc{0.0, 0.0, 0.0};
      double prev = s;
      for (double t : ts) {
        const auto in = rate_integrals(*r, prev, t);
        for (int i = 0; i < 3; ++i) acc[i] += in[i];
        prev = t;
        out.push_back({min_prob(pauli_probs_from_eigen(detail::eigen_from_rate_integrals(acc)))});
      }
      return out;
    }
    for (double t : ts) out.push_back(cell_value(s, t));
    return out;
  }

  /// Master-equation rates at t (rate-driven families only).
  std::array<double, 3> rates(double t) const {
    if (auto* r = std::get_if<PauliRatesSpec>(&spec_)) {
      return {r->gx(t), r->gy(t), r->gz(t)};
    }
    if (auto* q = std::get_if<QuasiEternalSpec>(&spec_)) {
      if (t < q->t_unitary) return {0.0, 0.0, 0.0};
      return quasi_eternal_rates(q->alpha, q->t0, t - q->t_unitary);
    }
    if (auto* sh = std::get_if<ShiftedSpec>(&spec_)) return sh->parent->rates(t + sh->shift);
    throw DomainError("evolution family has no master-equation rates");
  }

  /// Classifies V_{t+eps,t} for infinitesimal eps.
  InfinitesimalClass infinitesimal_class(double t, double eps) const {
    if (auto* d = std::get_if<DepolarizingSpec>(&spec_)) {
      return depolarizing_slope(d->f, t) > kDerivativeTol ? InfinitesimalClass::NonCptp
                                                          : InfinitesimalClass::Cptp;
    }
    if (rate_driven()) {
      const auto g = rates(t);
      double m = kInf_;
      for (double x : g) {
        if (!std::isfinite(x)) return InfinitesimalClass::Indeterminate;
        m = std::min(m, x);
      }
      return m < -kRateTol ? InfinitesimalClass::NonCptp : InfinitesimalClass::Cptp;
    }
    if (auto* sh = std::get_if<ShiftedSpec>(&spec_)) {
      return sh->parent->infinitesimal_class(t + sh->shift, eps);
    }
    // lambda_{t+eps,t} -> 0 with eps, so compare the sign of the scaled value
    // at two step sizes and halve until they agree.
    for (int k = 0; k < 8; ++k) {
      const auto a = scaled_class(t, eps);
      const auto b = scaled_class(t, eps / 2.0);
      if (a == b && a != InfinitesimalClass::Indeterminate) return a;
      eps /= 2.0;
    }
    return InfinitesimalClass::Indeterminate;
  }

  /// Forward slope of a depolarizing f near t = 0, central difference elsewhere.
  static double depolarizing_slope(const ScalarFn& f, double t) {
    const double h = ScalarFn::kDerivativeStep;
    if (t < h) return (f.eval_finite(t + h) - f.eval_finite(t)) / h;
    return f.derivative(t);
  }

 private:
  InfinitesimalClass scaled_class(double t, double eps) const {
    const CellSample c = cell_value(t, t + eps);
    if (c.undefined || !std::isfinite(c.value)) return InfinitesimalClass::Indeterminate;
    return c.value / eps < -kRateTol ? InfinitesimalClass::NonCptp : InfinitesimalClass::Cptp;
  }

  static std::optional<double> find_first_zero(const ScalarFn& f, double horizon) {
    const int n = 2001;
    const auto ts = uniform_grid(0.0, horizon, n);
    std::vector<double> v(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) v[k] = f(ts[k]);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (!std::isfinite(v[k])) continue;
      if (std::abs(v[k]) <= kZeroTol) return ts[k];
      if (k + 1 < ts.size() && std::isfinite(v[k + 1]) && v[k] * v[k + 1] < 0.0) {
        double lo = ts[k], hi = ts[k + 1];
        const bool pos = v[k] > 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
          const double m = 0.5 * (lo + hi);
          ((f(m) > 0.0) == pos ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
      }
      // Touching zeros such as (2t - 1)^2 do not change sign; refine interior
      // local minima of |f|.
      if (k > 0 && k + 1 < ts.size() && std::abs(v[k]) <= std::abs(v[k - 1]) &&
          std::abs(v[k]) <= std::abs(v[k + 1]) && std::abs(v[k]) < 1e-2) {
        const auto m = brent_minimize([&f](double x) { return std::abs(f(x)); }, ts[k - 1],
                                      ts[k + 1], 52);
        if (m.value <= kZeroTol) return m.x;
      }
    }
    return std::nullopt;
  }

  // -- depolarizing --------------------------------------------------------

  Superoperator dynamical_map_impl(const DepolarizingSpec& d, double t) const {
    const double f = d.f.eval_finite(t);
    if (f < -1e-9 || f > 1.0 + 1e-9) {
      throw CptpViolation("characteristic function outside [0, 1] at t = " + std::to_string(t));
    }
    return depolarizing_map(d.dim, f);
  }

  std::optional<Superoperator> intermediate_impl(const DepolarizingSpec& d, double s,
                                                 double t) const {
    if (s == t) return identity_map(d.dim);
    const double fs = d.f.eval_finite(s);
    if (std::abs(fs) <= kZeroTol) return std::nullopt;
    return depolarizing_map(d.dim, d.f.eval_finite(t) / fs);
  }

  CellSample cell_impl(const DepolarizingSpec& d, double s, double t) const {
    if (s == t) return {0.0};
    const double fs = d.f.eval_finite(s);
    const double ft = d.f.eval_finite(t);
    const double d2 = static_cast<double>(d.dim * d.dim);
    if (regularized()) return {(fs - ft) / d2, std::abs(fs) <= kZeroTol};
    return {(1.0 - ft / fs) / d2};
  }

  // -- Pauli probabilities -------------------------------------------------

  static PauliProbs probs_at(const PauliProbsSpec& p, double t) {
    const double px = p.px.eval_finite(t);
    const double py = p.py.eval_finite(t);
    const double pz = p.pz.eval_finite(t);
    return {1.0 - px - py - pz, px, py, pz};
  }

  Superoperator dynamical_map_impl(const PauliProbsSpec& p, double t) const {
    const PauliProbs pr = probs_at(p, t);
    if (min_prob(pr) < -1e-9) {
      throw CptpViolation("negative Pauli probability at t = " + std::to_string(t));
    }
    return pauli_map(pr);
  }

  std::optional<Superoperator> intermediate_impl(const PauliProbsSpec& p, double s,
                                                 double t) const {
    if (s == t) return identity_map(2);
    return compose_maps(pauli_map(probs_at(p, t)), invert_map(pauli_map(probs_at(p, s))));
  }

  CellSample cell_impl(const PauliProbsSpec& p, double s, double t) const {
    if (s == t) return {0.0};
    const PauliEigen ls = pauli_eigen_from_probs(probs_at(p, s));
    const PauliEigen lt = pauli_eigen_from_probs(probs_at(p, t));
    PauliEigen r{};
    for (int i = 0; i < 3; ++i) {
      if (std::abs(ls[i]) <= kZeroTol) return {std::numeric_limits<double>::quiet_NaN(), true};
      r[i] = lt[i] / ls[i];
    }
    return {min_prob(pauli_probs_from_eigen(r))};
  }

  // -- Pauli rates ---------------------------------------------------------

  std::array<double, 3> rate_integrals(const PauliRatesSpec& r, double s, double t) const {
    const auto& tab = *rate_tables_;
    return {tab[0].between(r.gx, s, t), tab[1].between(r.gy, s, t), tab[2].between(r.gz, s, t)};
  }

  PauliProbs rate_probs(const PauliRatesSpec& r, double s, double t) const {
    return pauli_probs_from_eigen(detail::eigen_from_rate_integrals(rate_integrals(r, s, t)));
  }

  Superoperator dynamical_map_impl(const PauliRatesSpec& r, double t) const {
    return pauli_map(rate_probs(r, 0.0, t));
  }

  std::optional<Superoperator> intermediate_impl(const PauliRatesSpec& r, double s,
                                                 double t) const {
    return pauli_map(rate_probs(r, s, t));
  }

  CellSample cell_impl(const PauliRatesSpec& r, double s, double t) const {
    if (s == t) return {0.0};
    return {min_prob(rate_probs(r, s, t))};
  }

  // -- quasi-eternal -------------------------------------------------------

  static PauliProbs qe_probs(const QuasiEternalSpec& q, double s, double t) {
    const double ss = std::max(0.0, s - q.t_unitary);
    const double tt = std::max(0.0, t - q.t_unitary);
    if (ss == tt) return {1.0, 0.0, 0.0, 0.0};
    return quasi_eternal_probs(q.alpha, q.t0, ss, tt);
  }

  Superoperator dynamical_map_impl(const QuasiEternalSpec& q, double t) const {
    const PauliProbs pr = qe_probs(q, 0.0, t);
    if (min_prob(pr) < -1e-9) {
      throw CptpViolation("quasi-eternal map is not CPTP (t0 < t0_alpha)");
    }
    return pauli_map(pr);
  }

  std::optional<Superoperator> intermediate_impl(const QuasiEternalSpec& q, double s,
                                                 double t) const {
    return pauli_map(qe_probs(q, s, t));
  }

  CellSample cell_impl(const QuasiEternalSpec& q, double s, double t) const {
    if (s == t) return {0.0};
    return {min_prob(qe_probs(q, s, t))};
  }

  // -- shifted -------------------------------------------------------------

  Superoperator dynamical_map_impl(const ShiftedSpec& sh, double t) const {
    auto v = sh.parent->intermediate_map(sh.shift, t + sh.shift);
    if (!v) throw SingularMap("parent intermediate map undefined at the shift time");
    return *v;
  }

  std::optional<Superoperator> intermediate_impl(const ShiftedSpec& sh, double s, double t) const {
    return sh.parent->intermediate_map(s + sh.shift, t + sh.shift);
  }

  CellSample cell_impl(const ShiftedSpec& sh, double s, double t) const {
    return sh.parent->cell_value(s + sh.shift, t + sh.shift);
  }

  EvolutionSpec spec_;
  double horizon_;
  std::optional<double> t_nb_;
  std::shared_ptr<const std::array<detail::RateTable, 3>> rate_tables_;
};

/// V_{t,s} = Lambda_t o Lambda_s^{-1} computed by numeric inversion.
inline Superoperator intermediate_by_inversion(const Evolution& e, double s, double t,
                                               double singular_tol = Tolerances{}.singularity) {
  return compose_maps(e.dynamical_map(t), invert_map(e.dynamical_map(s), singular_tol));
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  bool valid = true;
  bool initial_identity = true;
  std::optional<double> non_bijective_time;
  double min_dynamical_choi = 0.0;
  std::vector<std::string> issues;
};

inline ValidationReport validate_spec(const EvolutionSpec& spec, double horizon, int n) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (n < 2) throw DomainError("validation needs at least two grid points");
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    rep.valid = false;
    rep.issues.push_back(std::move(msg));
  };
  const auto ts = uniform_grid(0.0, horizon, n);

  if (auto* d = std::get_if<DepolarizingSpec>(&spec)) {
    const double f0 = d->f(0.0);
    if (!(std::abs(f0 - 1.0) <= 1e-9)) {
      rep.initial_identity = false;
      fail("f(0) = " + detail::format_number(f0) + ", expected 1");
    }
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -fmin;
    for (double t : ts) {
      const double f = d->f(t);
      if (!std::isfinite(f)) {
        fail("f is not finite at t = " + detail::format_number(t));
        return rep;
      }
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    if (fmax > 1.0 + 1e-9) fail("f exceeds 1 (max " + detail::format_number(fmax) + ")");
    if (fmin < -1e-9) fail("f is negative (min " + detail::format_number(fmin) + ")");
    const Evolution e(spec, horizon);
    rep.non_bijective_time = e.non_bijective_time();
    if (rep.valid) {
      double m = 0.0;
      for (double t : ts) m = std::min(m, min_choi_eigenvalue(e.dynamical_map(t)));
      rep.min_dynamical_choi = m;
    }
    return rep;
  }

  if (auto* q = std::get_if<QuasiEternalSpec>(&spec)) {
    if (!(q->alpha > 0.0)) {
      fail("alpha must be positive");
      return rep;
    }
    const double floor = t0_alpha(q->alpha);
    if (q->t0 < floor - 1e-12) {
      fail("t0 = " + detail::format_number(q->t0) + " is below t0_alpha = " +
           detail::format_number(floor));
    }
    if (q->t_unitary < 0.0) fail("unitary prefix must be non-negative");
  }

  // Pauli families: every weight of Lambda_t must be non-negative.
  const Evolution e(spec, horizon);
  double m = 0.0;
  for (double t : ts) m = std::min(m, e.cell_value(0.0, t).value);
  rep.min_dynamical_choi = m;
  if (m < -1e-9) fail("dynamical map is not CPTP on the grid (min weight " + detail::format_number(m) + ")");
  if (!(std::abs(e.cell_value(0.0, 0.0).value) <= 1e-9)) rep.initial_identity = false;
  return rep;
}

/// Validates and builds an evolution; throws CptpViolation on invalid specs.
inline Evolution make_evolution(const EvolutionSpec& spec, double horizon = 5.0, int n = 400) {
  const ValidationReport rep = validate_spec(spec, horizon, n);
  if (!rep.valid) {
    std::string msg = "invalid evolution:";
    for (const auto& i : rep.issues) msg += " " + i + ";";
    throw CptpViolation(msg);
  }
  return Evolution(spec, horizon);
}

// ---------------------------------------------------------------------------
// Catalog

struct PresetInfo {
  std::string name;
  std::string description;
};

struct PresetParams {
  std::optional<double> alpha;
  std::optional<double> t0;
  std::optional<double> t_unitary;
};

inline constexpr const char* kPaperExampleF = "(1-3*t+2*t^2+2*t^3)/(1+t^2+t^3+3*t^5)";
inline constexpr const char* kAppendixF = "(2*t-1)^2/(2*t^3-t+1)";

inline std::vector<PresetInfo> catalog() {
  return {
      {"paper-example", std::string("qubit depolarizing, f = ") + kPaperExampleF},
      {"appendix-f", std::string("non-bijective qubit depolarizing, f = ") + kAppendixF},
      {"eternal", "quasi-eternal Pauli model with alpha = 1, t0 = 0"},
      {"quasi-eternal", "quasi-eternal Pauli model; parameters alpha (default 0.1), t0 (default t0_alpha)"},
      {"pathological", "Pauli rates {1, 1, -sin(1/t) tanh(t)}"},
      {"unitary-prefix", "identity on [0, tU], then eternal with alpha = 2; parameter tU (default 1)"},
  };
}

inline EvolutionSpec preset_spec(const std::string& name, const PresetParams& p = {}) {
  if (name == "paper-example") return DepolarizingSpec{2, ScalarFn::parse(kPaperExampleF)};
  if (name == "appendix-f") return DepolarizingSpec{2, ScalarFn::parse(kAppendixF)};
  if (name == "eternal") return QuasiEternalSpec{1.0, 0.0, 0.0};
  if (name == "quasi-eternal") {
    const double alpha = p.alpha.value_or(0.1);
    return QuasiEternalSpec{alpha, p.t0.value_or(t0_alpha(alpha)), p.t_unitary.value_or(0.0)};
  }
  if (name == "pathological") {
    return PauliRatesSpec{ScalarFn::parse("1"), ScalarFn::parse("1"),
                          ScalarFn::parse("-sin(1/t)*tanh(t)")};
  }
  if (name == "unitary-prefix") {
    return QuasiEternalSpec{p.alpha.value_or(2.0), p.t0.value_or(0.0), p.t_unitary.value_or(1.0)};
  }
  throw DomainError("unknown preset '" + name + "'");
}

}  // namespace pnm

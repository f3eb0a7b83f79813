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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pnm/errors.hpp"

namespace pnm {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  int max_depth = 40;
  /// Total integrand evaluations allowed per call.
  std::size_t max_evaluations = 4'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  std::size_t evaluations = 0;
  /// Some sub-interval stopped at max_depth without meeting its tolerance.
  bool depth_limited = false;
};

namespace detail {

template <class F>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const F& f, const QuadratureOptions& opt) : f_(f), opt_(opt) {}

  QuadratureResult run(double a, double b) {
    QuadratureResult r;
    if (a == b) return r;
    const double fa = eval(a, a, b);
    const double fb = eval(b, a, b);
    const double m = 0.5 * (a + b);
    const double fm = eval(m, a, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    r.value = recurse(a, b, fa, fm, fb, whole, opt_.abs_tol, opt_.max_depth);
    r.evaluations = evaluations_;
    r.depth_limited = depth_limited_;
    if (!std::isfinite(r.value)) throw QuadratureFailure("integral is not finite");
    return r;
  }

 private:
  // Integrands with a removable singularity at an interval endpoint (such as
  // tanh(t) sin(1/t) at 0) are sampled a hair inside the interval instead.
  double eval(double x, double a, double b) {
    if (++evaluations_ > opt_.max_evaluations) {
      throw QuadratureFailure("adaptive Simpson exceeded its evaluation budget");
    }
    double v = f_(x);
    if (!std::isfinite(v) && (x == a || x == b)) {
      const double nudge = 1e-14 * (b - a);
      v = f_(x == a ? a + nudge : b - nudge);
    }
    if (!std::isfinite(v)) throw QuadratureFailure("integrand is not finite");
    return v;
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm, a, b);
    const double frm = eval(rm, a, b);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    if (depth <= 0) {
      depth_limited_ = true;
      return left + right + delta / 15.0;
    }
    const double next = std::max(0.5 * eps, kEpsFloor);
    return recurse(a, m, fa, flm, fm, left, next, depth - 1) +
           recurse(m, b, fm, frm, fb, right, next, depth - 1);
  }

  static constexpr double kEpsFloor = 1e-15;

  const F& f_;
  QuadratureOptions opt_;
  std::size_t evaluations_ = 0;
  bool depth_limited_ = false;
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] (a > b gives the negated integral).
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, QuadratureOptions opt = {}) {
  if (a > b) {
    QuadratureResult r = adaptive_simpson(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return detail::AdaptiveSimpson<F>(f, opt).run(a, b);
}

/// Boundary of a predicate that holds at `good` and fails at `bad`.
/// Returns the last point known to satisfy the predicate, within `tol`.
template <class Pred>
double bisect_predicate(const Pred& holds, double good, double bad, double tol) {
  for (int it = 0; it < 200 && std::abs(bad - good) > tol; ++it) {
    const double mid = 0.5 * (good + bad);
    if (holds(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

struct Minimum {
  double x;
  double value;
};

/// Local minimum of f on [lo, hi] (Brent's method).
template <class F>
Minimum brent_minimize(const F& f, double lo, double hi, int bits = 40) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
  return {r.first, r.second};
}

/// t_k = k * horizon / (n - 1), k = 0..n-1.
inline std::vector<double> uniform_grid(double start, double stop, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / (n - 1);
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = start + k * step;
  out.back() = stop;
  return out;
}

}  // namespace pnm

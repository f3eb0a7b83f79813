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

// Dense complex linear algebra for small open-system problems (d <= 8).
//
// Conventions:
//  * Operators are vectorized by column stacking: vec(X)[i + d*j] = X(i, j).
//    Under this convention vec(A X B) = (B^T kron A) vec(X).
//  * A superoperator is the d^2 x d^2 matrix S with vec(Phi(X)) = S vec(X).
//  * The Choi matrix is normalized, J = (Phi kron id)(|phi+><phi+|) with
//    |phi+> = sum_i |i>|i> / sqrt(d); the system factor comes first, so
//    J(a*d + i, b*d + j) = Phi(|i><j|)(a, b) / d.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pnm/errors.hpp"

namespace pnm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Default tolerances shared by the channel predicates.
struct Tolerances {
  double cptp = 1e-9;
  double hermiticity = 1e-8;
  double singularity = 1e-8;
  double ppt = 1e-10;
};

namespace detail {

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline int checked_dim_from_square(int n) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) {
    throw DimensionMismatch("superoperator size " + std::to_string(n) +
                            " is not a perfect square");
  }
  return d;
}

}  // namespace detail

/// A d x d density matrix: hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static constexpr double kTol = 1e-10;

  /// Validates `m` against the density-matrix invariants.
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw DimensionMismatch("density matrix must be square and non-empty");
    }
    if (detail::max_abs(m_ - m_.adjoint()) > kTol) {
      throw NotHermitian("density matrix is not hermitian");
    }
    if (std::abs(m_.trace() - Complex(1.0)) > kTol) {
      throw DomainError("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTol) {
      throw DomainError("density matrix has a negative eigenvalue");
    }
  }

  /// |k><k| in dimension d.
  static DensityMatrix basis(int d, int k) {
    CMatrix m = CMatrix::Zero(d, d);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m));
  }

  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(const CVector& psi) {
    const double n = psi.squaredNorm();
    if (n <= 0.0) throw DomainError("zero state vector");
    return DensityMatrix(psi * psi.adjoint() / n);
  }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
  }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const& noexcept { return m_; }
  CMatrix matrix() && { return std::move(m_); }

 private:
  CMatrix m_;
};

/// Linear map on d x d operators stored as a d^2 x d^2 matrix.
class Superoperator {
 public:
  explicit Superoperator(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw DimensionMismatch("superoperator matrix must be square");
    }
    d_ = detail::checked_dim_from_square(static_cast<int>(m_.rows()));
  }

  int dim() const noexcept { return d_; }
  const CMatrix& matrix() const& noexcept { return m_; }
  CMatrix matrix() && { return std::move(m_); }

  /// trace(S(B)) = trace(B) for every matrix unit B = |i><j|.
  bool is_trace_preserving(double tol = 1e-9) const {
    // Row vector vec(1)^T S must equal vec(1)^T.
    for (int c = 0; c < d_ * d_; ++c) {
      Complex acc = 0.0;
      for (int a = 0; a < d_; ++a) acc += m_(a + d_ * a, c);
      const int i = c % d_;
      const int j = c / d_;
      const Complex expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(acc - expected) > tol) return false;
    }
    return true;
  }

 private:
  int d_ = 0;
  CMatrix m_;
};

/// Normalized Choi matrix of a superoperator.
class ChoiMatrix {
 public:
  ChoiMatrix(int d, CMatrix m) : d_(d), m_(std::move(m)) {}
  int dim() const noexcept { return d_; }
  const CMatrix& matrix() const& noexcept { return m_; }
  CMatrix matrix() && { return std::move(m_); }

 private:
  int d_;
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Vectorization

inline CVector vec(const CMatrix& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

inline CMatrix unvec(const CVector& v, int d) {
  if (v.size() != d * d) throw DimensionMismatch("vector length is not d^2");
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard maps

inline Superoperator identity_map(int d) {
  return Superoperator(CMatrix::Identity(d * d, d * d));
}

/// X -> U X U^dagger.
inline Superoperator unitary_map(const CMatrix& u) {
  return Superoperator(kron(u.conjugate(), u));
}

/// X -> sum_k A_k X A_k^dagger.
inline Superoperator kraus_map(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw DimensionMismatch("empty Kraus list");
  const auto d = kraus.front().rows();
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (const auto& a : kraus) {
    if (a.rows() != d || a.cols() != d) throw DimensionMismatch("Kraus operator size");
    s += kron(a.conjugate(), a);
  }
  return Superoperator(std::move(s));
}

/// X -> f X + (1 - f) tr(X) 1/d.
inline Superoperator depolarizing_map(int d, double f) {
  CMatrix s = f * CMatrix::Identity(d * d, d * d);
  const CVector one = vec(CMatrix::Identity(d, d));
  s += ((1.0 - f) / d) * one * one.transpose();
  return Superoperator(std::move(s));
}

inline const std::array<CMatrix, 4>& pauli_matrices() {
  static const std::array<CMatrix, 4> paulis = [] {
    std::array<CMatrix, 4> p;
    const Complex i(0.0, 1.0);
    p[0] = CMatrix::Identity(2, 2);
    p[1] = CMatrix(2, 2);
    p[1] << 0, 1, 1, 0;
    p[2] = CMatrix(2, 2);
    p[2] << 0, -i, i, 0;
    p[3] = CMatrix(2, 2);
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return paulis;
}

/// X -> sum_i p_i sigma_i X sigma_i with p = {p_0, p_x, p_y, p_z}.
/// The weights need not be non-negative; the map is linear either way.
inline Superoperator pauli_map(const std::array<double, 4>& p) {
  const auto& s = pauli_matrices();
  CMatrix m = CMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) m += p[k] * kron(s[k].conjugate(), s[k]);
  return Superoperator(std::move(m));
}

// ---------------------------------------------------------------------------
// Operations

inline CMatrix apply_map(const Superoperator& s, const CMatrix& x) {
  if (x.rows() != s.dim() || x.cols() != s.dim()) {
    throw DimensionMismatch("operator dimension does not match superoperator");
  }
  return unvec(s.matrix() * vec(x), s.dim());
}

inline CMatrix apply_map(const Superoperator& s, const DensityMatrix& rho) {
  return apply_map(s, rho.matrix());
}

/// s2 after s1.
inline Superoperator compose_maps(const Superoperator& s2, const Superoperator& s1) {
  if (s2.dim() != s1.dim()) throw DimensionMismatch("cannot compose maps of different dimension");
  return Superoperator(s2.matrix() * s1.matrix());
}

inline double smallest_singular_value(const Superoperator& s) {
  Eigen::JacobiSVD<CMatrix> svd(s.matrix());
  return svd.singularValues().minCoeff();
}

inline Superoperator invert_map(const Superoperator& s, double tol = Tolerances{}.singularity) {
  Eigen::JacobiSVD<CMatrix> svd(s.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  if (sv.minCoeff() <= tol) {
    throw SingularMap("map is not invertible (smallest singular value " +
                      std::to_string(sv.minCoeff()) + ")");
  }
  CMatrix inv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  return Superoperator(std::move(inv));
}

inline ChoiMatrix choi_of(const Superoperator& s) {
  const int d = s.dim();
  CMatrix j(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
          j(a * d + i, b * d + k) = s.matrix()(a + d * b, i + d * k) / static_cast<double>(d);
        }
      }
    }
  }
  return ChoiMatrix(d, std::move(j));
}

/// Eigenvalues (ascending) of a hermitian matrix; throws if the anti-hermitian
/// part exceeds `tol`.
inline RVector hermitian_eigenvalues(const CMatrix& h, double tol = Tolerances{}.hermiticity) {
  if (detail::max_abs(h - h.adjoint()) / 2.0 > tol) {
    throw NotHermitian("operator is not hermitian");
  }
  const CMatrix herm = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline RVector choi_eigenvalues(const Superoperator& s) {
  const ChoiMatrix j = choi_of(s);
  if (detail::max_abs(j.matrix() - j.matrix().adjoint()) / 2.0 > Tolerances{}.hermiticity) {
    throw NonHermitianChoi("Choi matrix has a significant anti-hermitian part");
  }
  const CMatrix herm = (j.matrix() + j.matrix().adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_choi_eigenvalue(const Superoperator& s) {
  return choi_eigenvalues(s).minCoeff();
}

inline bool is_cptp(const Superoperator& s, double tol = Tolerances{}.cptp) {
  return s.is_trace_preserving(tol) && min_choi_eigenvalue(s) >= -tol;
}

/// Rank-one Choi plus trace preservation is a unitary conjugation.
inline bool is_unitary_map(const Superoperator& s, double tol = Tolerances{}.cptp) {
  const CMatrix j = choi_of(s).matrix();
  const double purity = (j * j.adjoint()).trace().real();
  return purity >= 1.0 - tol;
}

inline double trace_norm(const CMatrix& h) {
  return hermitian_eigenvalues(h).cwiseAbs().sum();
}

/// Partial transpose on the second (ancilla) factor of a d x d bipartite operator.
inline CMatrix partial_transpose_second(const CMatrix& m, int d) {
  CMatrix out(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) out(a * d + i, b * d + k) = m(a * d + k, b * d + i);
      }
    }
  }
  return out;
}

/// Entanglement breaking test for qubit channels via PPT of the Choi matrix.
inline bool is_eb_qubit(const Superoperator& s, double tol = Tolerances{}.ppt) {
  if (s.dim() != 2) {
    throw UnsupportedDimension("entanglement-breaking test is only exact for qubits");
  }
  const CMatrix pt = partial_transpose_second(choi_of(s).matrix(), 2);
  return hermitian_eigenvalues(pt).minCoeff() >= -tol;
}

}  // namespace pnm

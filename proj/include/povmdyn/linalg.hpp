// Copyright 2026 The povmdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex Hermitian linear algebra used by every other module.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <utility>
#include <vector>

#include "povmdyn/error.hpp"

namespace povmdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// PSD checks accept lambda_min >= -kPsdTol * max(1, ||H||_2).
inline constexpr double kPsdTol = 1e-9;
/// Eigenvalues <= kRankTol * lambda_max count as kernel in pinv_support.
inline constexpr double kRankTol = 1e-9;
/// Absolute floor under the relative rank cut; eigenvalues this small are
/// rounding dust and never enter a pseudo-inverse.
inline constexpr double kRankFloor = 1e-14;

/// Square complex matrix with H = H^dagger enforced on construction by
/// replacing the input with (H + H^dagger) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() : m_(ComplexMatrix::Zero(1, 1)) {}

  explicit HermitianMatrix(const ComplexMatrix& m) : m_(m) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      std::ostringstream os;
      os << "HermitianMatrix needs a non-empty square matrix, got " << m_.rows() << "x"
         << m_.cols();
      throw DimensionMismatch(os.str());
    }
    if (!m_.allFinite()) throw NumericFailure("HermitianMatrix has non-finite entries");
    symmetrize();
  }

  HermitianMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto d = static_cast<Eigen::Index>(rows.size());
    m_.resize(d, d);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != d)
        throw DimensionMismatch("HermitianMatrix initializer rows must form a square");
      Eigen::Index j = 0;
      for (const auto& v : row) m_(i, j++) = v;
      ++i;
    }
    *this = HermitianMatrix(m_);
  }

  static HermitianMatrix zero(std::size_t d) { return HermitianMatrix(ComplexMatrix::Zero(idx(d), idx(d))); }
  static HermitianMatrix identity(std::size_t d) {
    return HermitianMatrix(ComplexMatrix::Identity(idx(d), idx(d)));
  }
  static HermitianMatrix diagonal(const std::vector<double>& diag) {
    ComplexMatrix m = ComplexMatrix::Zero(idx(diag.size()), idx(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) m(idx(i), idx(i)) = diag[i];
    return HermitianMatrix(m);
  }
  /// |v><v| for a (not necessarily normalized) column vector.
  static HermitianMatrix outer(const Eigen::VectorXcd& v) { return HermitianMatrix(v * v.adjoint()); }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(idx(i), idx(j)); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator-(HermitianMatrix a) { return a *= -1.0; }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
  void symmetrize() { m_ = (0.5 * (m_ + m_.adjoint())).eval(); }
  void check_same(const HermitianMatrix& o) const {
    if (o.dim() != dim()) throw DimensionMismatch("Hermitian operands of different dimension");
  }

  ComplexMatrix m_;
};

/// Largest entrywise modulus of A - B.
inline double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff: dimension mismatch");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

struct EigenSystem {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors;  // columns, unitary
};

inline EigenSystem eig_h(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge (dim " << h.dim() << ", max |entry| "
       << h.matrix().cwiseAbs().maxCoeff() << ")";
    throw NumericFailure(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector eigenvalues(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("eigensolver did not converge");
  return solver.eigenvalues();
}

inline double lambda_min(const HermitianMatrix& h) { return eigenvalues(h)(0); }
inline double lambda_max(const HermitianMatrix& h) {
  const RealVector ev = eigenvalues(h);
  return ev(ev.size() - 1);
}

/// Operator 2-norm, max |lambda|.
inline double spectral_norm(const HermitianMatrix& h) {
  const RealVector ev = eigenvalues(h);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// f applied to the spectrum: V f(diag(lambda)) V^dagger.
template <typename F>
HermitianMatrix apply_spectral(const EigenSystem& es, F&& f) {
  RealVector mapped(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(es.eigenvalues(i));
  return HermitianMatrix(es.eigenvectors * mapped.cast<Complex>().asDiagonal() *
                         es.eigenvectors.adjoint());
}

inline bool is_psd(const HermitianMatrix& h, double tol = kPsdTol) {
  const RealVector ev = eigenvalues(h);
  const double scale = std::max({1.0, std::abs(ev(0)), std::abs(ev(ev.size() - 1))});
  return ev(0) >= -tol * scale;
}

/// Principal square root. Eigenvalues in [-tol, 0) are clamped to zero.
inline HermitianMatrix sqrt_psd(const HermitianMatrix& h, double tol = kPsdTol) {
  const EigenSystem es = eig_h(h);
  const double lo = es.eigenvalues(0);
  const double hi = es.eigenvalues(es.eigenvalues.size() - 1);
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (lo < -tol * scale) {
    std::ostringstream os;
    os << "sqrt_psd: matrix is not PSD (lambda_min = " << lo << ")";
    throw DomainError(os.str());
  }
  return apply_spectral(es, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

struct SupportInverse {
  HermitianMatrix pinv;
  HermitianMatrix support;  // orthogonal projector onto supp(H)
};

/// Moore-Penrose inverse restricted to the support of a PSD matrix, plus the
/// support projector. The kernel projector is identity - support.
inline SupportInverse pinv_support(const HermitianMatrix& h, double rank_tol = kRankTol) {
  const EigenSystem es = eig_h(h);
  const double top = es.eigenvalues(es.eigenvalues.size() - 1);
  const double cut = std::max(rank_tol * top, kRankFloor);
  auto in_support = [cut](double x) { return x > cut; };
  return {apply_spectral(es, [&](double x) { return in_support(x) ? 1.0 / x : 0.0; }),
          apply_spectral(es, [&](double x) { return in_support(x) ? 1.0 : 0.0; })};
}

/// A <= B in the Loewner order, i.e. B - A is PSD within tol.
inline bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol = kPsdTol) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimension mismatch");
  return is_psd(b - a, tol);
}

/// Hilbert-Schmidt inner product tr(A B), real for Hermitian operands.
inline double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("hs_inner: dimension mismatch");
  return (a.matrix().adjoint() * b.matrix()).trace().real();
}

inline double hs_norm(const HermitianMatrix& a) { return a.matrix().norm(); }

/// R X R for Hermitian R; used with R a PSD square root.
inline HermitianMatrix congruence(const HermitianMatrix& r, const HermitianMatrix& x) {
  if (r.dim() != x.dim()) throw DimensionMismatch("congruence: dimension mismatch");
  return HermitianMatrix(r.matrix() * x.matrix() * r.matrix());
}

/// ||AB - BA||_2 (Hilbert-Schmidt).
inline double commutator_norm(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator_norm: dimension mismatch");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

}  // namespace povmdyn

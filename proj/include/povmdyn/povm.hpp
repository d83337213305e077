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

// Measurement domain types: effects, POVMs (blockwise probability vectors),
// block matrices and density matrices, with validation and the canonical
// constructions used throughout the library.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"

namespace povmdyn {

/// Entrywise budget for "sums to identity" checks.
inline constexpr double kSumTol = 1e-9;
/// Trace budget for density matrices.
inline constexpr double kTraceTol = 1e-10;

struct Violation {
  enum class Kind {
    kEmptyInput,
    kDimensionMismatch,
    kNonPsdEffect,
    kEffectAboveIdentity,
    kSumNotIdentity,
    kNonPsdBlock,
  };
  Kind kind;
  std::size_t row = 0;  // effect index, or block row
  std::size_t col = 0;  // block column
  double value = 0.0;   // lambda_min, or max entrywise deviation
  std::string message;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::kEmptyInput: return "EmptyInput";
    case Violation::Kind::kDimensionMismatch: return "DimensionMismatch";
    case Violation::Kind::kNonPsdEffect: return "NonPsdEffect";
    case Violation::Kind::kEffectAboveIdentity: return "EffectAboveIdentity";
    case Violation::Kind::kSumNotIdentity: return "SumNotIdentity";
    case Violation::Kind::kNonPsdBlock: return "NonPsdBlock";
  }
  return "Unknown";
}

/// Thrown by the validators; carries every violated constraint, not just
/// the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> v)
      : Error(summarize(v)), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::ostringstream os;
    os << "validation failed:";
    for (const auto& x : v) os << " [" << to_string(x.kind) << "] " << x.message << ";";
    return os.str();
  }
  std::vector<Violation> violations_;
};

/// PSD operator with 0 <= P <= 1.
class Effect {
 public:
  explicit Effect(HermitianMatrix m, double tol = kPsdTol) : m_(std::move(m)) {
    const RealVector ev = eigenvalues(m_);
    const double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
    if (ev(0) < -tol * scale || ev(ev.size() - 1) > 1.0 + tol * scale) {
      std::ostringstream os;
      os << "not an effect: spectrum [" << ev(0) << ", " << ev(ev.size() - 1) << "]";
      throw DomainError(os.str());
    }
  }
  const HermitianMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }

 private:
  HermitianMatrix m_;
};

/// PSD, unit-trace operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix m, double tol = kPsdTol) : m_(std::move(m)) {
    if (!is_psd(m_, tol)) {
      std::ostringstream os;
      os << "density matrix is not PSD (lambda_min = " << lambda_min(m_) << ")";
      throw DomainError(os.str());
    }
    if (std::abs(m_.trace() - 1.0) > kTraceTol) {
      std::ostringstream os;
      os << "density matrix trace is " << m_.trace();
      throw DomainError(os.str());
    }
  }
  static DensityMatrix maximally_mixed(std::size_t d) {
    return DensityMatrix(HermitianMatrix::identity(d) * (1.0 / static_cast<double>(d)));
  }
  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    const double nrm = psi.squaredNorm();
    if (!(nrm > 0.0)) throw DomainError("pure state from a zero vector");
    return DensityMatrix(HermitianMatrix::outer(psi) * (1.0 / nrm));
  }
  const HermitianMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }

 private:
  HermitianMatrix m_;
};

/// Born probability tr(P rho).
inline double expectation(const HermitianMatrix& p, const DensityMatrix& rho) {
  return hs_inner(p, rho.matrix());
}

class Povm;
Povm validate_povm(std::span<const HermitianMatrix> effects, double tol);

/// Blockwise probability vector: n PSD effects of size d summing to identity.
class Povm {
 public:
  std::size_t n() const { return effects_.size(); }
  std::size_t d() const { return effects_.front().dim(); }
  const std::vector<HermitianMatrix>& effects() const { return effects_; }
  const HermitianMatrix& operator[](std::size_t j) const { return effects_.at(j); }

  /// Outcome distribution (tr(P_j rho))_j.
  std::vector<double> probabilities(const DensityMatrix& rho) const {
    if (rho.dim() != d()) throw DimensionMismatch("probabilities: state dimension mismatch");
    std::vector<double> p;
    p.reserve(n());
    for (const auto& e : effects_) p.push_back(expectation(e, rho));
    return p;
  }

  /// Effects reordered as (P_{perm[0]}, P_{perm[1]}, ...).
  Povm permuted(std::span<const std::size_t> perm) const {
    check_permutation(perm, n());
    std::vector<HermitianMatrix> out;
    out.reserve(n());
    for (auto k : perm) out.push_back(effects_[k]);
    return Povm(std::move(out));
  }

  static void check_permutation(std::span<const std::size_t> perm, std::size_t n) {
    if (perm.size() != n) throw DomainError("permutation has wrong length");
    std::vector<bool> seen(n, false);
    for (auto k : perm) {
      if (k >= n || seen[k]) throw DomainError("not a permutation");
      seen[k] = true;
    }
  }

 private:
  explicit Povm(std::vector<HermitianMatrix> e) : effects_(std::move(e)) {}
  friend Povm validate_povm(std::span<const HermitianMatrix>, double);

  std::vector<HermitianMatrix> effects_;
};

/// Checks positivity of each effect (relative tol) and the identity
/// resolution (entrywise budget max(tol, 0)). Collects every violation.
inline Povm validate_povm(std::span<const HermitianMatrix> effects, double tol = kSumTol) {
  std::vector<Violation> bad;
  if (effects.empty()) {
    bad.push_back({Violation::Kind::kEmptyInput, 0, 0, 0.0, "POVM needs at least one effect"});
    throw ValidationError(std::move(bad));
  }
  const std::size_t d = effects.front().dim();
  for (std::size_t j = 0; j < effects.size(); ++j) {
    if (effects[j].dim() != d) {
      std::ostringstream os;
      os << "effect " << j << " has dim " << effects[j].dim() << ", expected " << d;
      bad.push_back({Violation::Kind::kDimensionMismatch, j, 0, 0.0, os.str()});
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  HermitianMatrix sum = HermitianMatrix::zero(d);
  for (std::size_t j = 0; j < effects.size(); ++j) {
    const double lo = lambda_min(effects[j]);
    if (!is_psd(effects[j], tol)) {
      std::ostringstream os;
      os << "effect " << j << " has lambda_min " << lo;
      bad.push_back({Violation::Kind::kNonPsdEffect, j, 0, lo, os.str()});
    }
    sum += effects[j];
  }
  const double dev = max_abs_diff(sum, HermitianMatrix::identity(d));
  if (dev > tol) {
    std::ostringstream os;
    os << "effects sum to identity only within " << dev;
    bad.push_back({Violation::Kind::kSumNotIdentity, 0, 0, dev, os.str()});
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return Povm(std::vector<HermitianMatrix>(effects.begin(), effects.end()));
}

inline Povm validate_povm(const std::vector<HermitianMatrix>& effects, double tol = kSumTol) {
  return validate_povm(std::span<const HermitianMatrix>(effects), tol);
}

enum class BlockKind { kGeneral, kStochastic, kBistochastic };

inline const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::kGeneral: return "general";
    case BlockKind::kStochastic: return "stochastic";
    case BlockKind::kBistochastic: return "bistochastic";
  }
  return "unknown";
}

class BlockMatrix;
BlockMatrix validate_block(std::vector<std::vector<HermitianMatrix>> grid, double tol);

/// rows x cols grid of PSD d x d blocks. Stochasticity is never stored; it is
/// recomputed from the blocks on demand.
class BlockMatrix {
 public:
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t d() const { return d_; }
  const HermitianMatrix& operator()(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw DimensionMismatch("block index out of range");
    return blocks_[i * cols_ + j];
  }
  std::vector<std::vector<HermitianMatrix>> grid() const {
    std::vector<std::vector<HermitianMatrix>> g(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      g[i].assign(blocks_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  blocks_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    return g;
  }

  HermitianMatrix column_sum(std::size_t j) const {
    HermitianMatrix s = HermitianMatrix::zero(d_);
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j);
    return s;
  }
  HermitianMatrix row_sum(std::size_t i) const {
    HermitianMatrix s = HermitianMatrix::zero(d_);
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j);
    return s;
  }

  /// Largest entrywise deviation of a block-column sum from identity.
  double column_deviation() const {
    double worst = 0.0;
    const auto id = HermitianMatrix::identity(d_);
    for (std::size_t j = 0; j < cols_; ++j) worst = std::max(worst, max_abs_diff(column_sum(j), id));
    return worst;
  }
  double row_deviation() const {
    double worst = 0.0;
    const auto id = HermitianMatrix::identity(d_);
    for (std::size_t i = 0; i < rows_; ++i) worst = std::max(worst, max_abs_diff(row_sum(i), id));
    return worst;
  }

  bool is_column_stochastic(double tol = kSumTol) const { return column_deviation() <= tol; }
  bool is_bistochastic(double tol = kSumTol) const {
    return rows_ == cols_ && is_column_stochastic(tol) && row_deviation() <= tol;
  }
  BlockKind kind(double tol = kSumTol) const {
    if (!is_column_stochastic(tol)) return BlockKind::kGeneral;
    return is_bistochastic(tol) ? BlockKind::kBistochastic : BlockKind::kStochastic;
  }

  /// Block transpose; blocks are Hermitian so they stay put.
  BlockMatrix adjoint() const {
    std::vector<HermitianMatrix> t;
    t.reserve(blocks_.size());
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t.push_back((*this)(i, j));
    return BlockMatrix(cols_, rows_, d_, std::move(t));
  }

  /// The n x 1 block column of a POVM.
  static BlockMatrix from_povm(const Povm& p) {
    return BlockMatrix(p.n(), 1, p.d(), p.effects());
  }
  /// Block column j read as a POVM (validated).
  Povm column(std::size_t j, double tol = kSumTol) const {
    std::vector<HermitianMatrix> e;
    for (std::size_t i = 0; i < rows_; ++i) e.push_back((*this)(i, j));
    return validate_povm(e, tol);
  }
  /// identity_{dn} split into d x d blocks.
  static BlockMatrix identity(std::size_t n, std::size_t d) {
    std::vector<HermitianMatrix> b;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        b.push_back(i == j ? HermitianMatrix::identity(d) : HermitianMatrix::zero(d));
    return BlockMatrix(n, n, d, std::move(b));
  }
  /// Every block equal to identity / n.
  static BlockMatrix flat(std::size_t n, std::size_t d) {
    std::vector<HermitianMatrix> b(n * n, HermitianMatrix::identity(d) * (1.0 / static_cast<double>(n)));
    return BlockMatrix(n, n, d, std::move(b));
  }

  friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
    a.check_same_shape(b);
    std::vector<HermitianMatrix> s;
    for (std::size_t k = 0; k < a.blocks_.size(); ++k) s.push_back(a.blocks_[k] + b.blocks_[k]);
    return BlockMatrix(a.rows_, a.cols_, a.d_, std::move(s));
  }
  /// Nonnegative rescaling (keeps blocks PSD).
  friend BlockMatrix operator*(double s, const BlockMatrix& a) {
    if (s < 0.0) throw DomainError("BlockMatrix scale must be nonnegative");
    std::vector<HermitianMatrix> out;
    for (const auto& b : a.blocks_) out.push_back(s * b);
    return BlockMatrix(a.rows_, a.cols_, a.d_, std::move(out));
  }

  /// Largest entrywise deviation between two equally shaped grids.
  friend double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b) {
    a.check_same_shape(b);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.blocks_.size(); ++k)
      worst = std::max(worst, max_abs_diff(a.blocks_[k], b.blocks_[k]));
    return worst;
  }

 private:
  BlockMatrix(std::size_t r, std::size_t c, std::size_t d, std::vector<HermitianMatrix> b)
      : rows_(r), cols_(c), d_(d), blocks_(std::move(b)) {}
  void check_same_shape(const BlockMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_ || o.d_ != d_)
      throw DimensionMismatch("block matrices of different shape");
  }
  friend BlockMatrix validate_block(std::vector<std::vector<HermitianMatrix>>, double);

  std::size_t rows_, cols_, d_;
  std::vector<HermitianMatrix> blocks_;
};

/// Checks the grid is rectangular with uniform block size and PSD blocks.
inline BlockMatrix validate_block(std::vector<std::vector<HermitianMatrix>> grid,
                                  double tol = kPsdTol) {
  std::vector<Violation> bad;
  if (grid.empty() || grid.front().empty()) {
    bad.push_back({Violation::Kind::kEmptyInput, 0, 0, 0.0, "block matrix needs at least one block"});
    throw ValidationError(std::move(bad));
  }
  const std::size_t rows = grid.size();
  const std::size_t cols = grid.front().size();
  const std::size_t d = grid.front().front().dim();
  for (std::size_t i = 0; i < rows; ++i) {
    if (grid[i].size() != cols) {
      std::ostringstream os;
      os << "block row " << i << " has " << grid[i].size() << " blocks, expected " << cols;
      bad.push_back({Violation::Kind::kDimensionMismatch, i, 0, 0.0, os.str()});
      continue;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (grid[i][j].dim() != d) {
        std::ostringstream os;
        os << "block (" << i << "," << j << ") has dim " << grid[i][j].dim() << ", expected " << d;
        bad.push_back({Violation::Kind::kDimensionMismatch, i, j, 0.0, os.str()});
      }
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  std::vector<HermitianMatrix> flat;
  flat.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (!is_psd(grid[i][j], tol)) {
        const double lo = lambda_min(grid[i][j]);
        std::ostringstream os;
        os << "block (" << i << "," << j << ") has lambda_min " << lo;
        bad.push_back({Violation::Kind::kNonPsdBlock, i, j, lo, os.str()});
      }
      flat.push_back(std::move(grid[i][j]));
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return BlockMatrix(rows, cols, d, std::move(flat));
}

/// V_j: identity in slot j (0-based), zero elsewhere.
inline Povm fuzzy_povm(std::size_t j, std::size_t n, std::size_t d) {
  if (j >= n) throw DomainError("fuzzy_povm: slot index out of range");
  std::vector<HermitianMatrix> e(n, HermitianMatrix::zero(d));
  e[j] = HermitianMatrix::identity(d);
  return validate_povm(e, 0.0);
}

/// P_u = (identity/n, ..., identity/n).
inline Povm uniform_povm(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw DomainError("uniform_povm: n and d must be positive");
  std::vector<HermitianMatrix> e(n, HermitianMatrix::identity(d) * (1.0 / static_cast<double>(n)));
  return validate_povm(e);
}

namespace pauli {

inline HermitianMatrix sigma_x() { return HermitianMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
inline HermitianMatrix sigma_y() {
  return HermitianMatrix{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}};
}
inline HermitianMatrix sigma_z() { return HermitianMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

/// Rank-1 projector onto the +1 (sign > 0) or -1 eigenspace of sigma.
inline HermitianMatrix projector(const HermitianMatrix& sigma, int sign) {
  return 0.5 * (HermitianMatrix::identity(2) + (sign > 0 ? 1.0 : -1.0) * sigma);
}
inline HermitianMatrix z_plus() { return projector(sigma_z(), +1); }
inline HermitianMatrix z_minus() { return projector(sigma_z(), -1); }
inline HermitianMatrix x_plus() { return projector(sigma_x(), +1); }
inline HermitianMatrix x_minus() { return projector(sigma_x(), -1); }
inline HermitianMatrix y_plus() { return projector(sigma_y(), +1); }
inline HermitianMatrix y_minus() { return projector(sigma_y(), -1); }

}  // namespace pauli

struct PauliPovms {
  Povm z, x, y, flat;
};

inline PauliPovms pauli_povms() {
  using namespace pauli;
  return {validate_povm({z_plus(), z_minus()}), validate_povm({x_plus(), x_minus()}),
          validate_povm({y_plus(), y_minus()}), uniform_povm(2, 2)};
}

/// d = 2 effect coordinates: t = tr P, tau = lambda_+ - lambda_- (Bloch length).
struct ConeCoords {
  double t;
  double tau;
};

inline ConeCoords cone_coordinates(const Effect& p) {
  if (p.dim() != 2) throw DimensionMismatch("cone_coordinates is defined for d = 2 only");
  const RealVector ev = eigenvalues(p.matrix());
  return {ev(0) + ev(1), ev(1) - ev(0)};
}

/// Membership of (t, tau) in the d = 2 double cone: tau <= min(t, 2 - t).
inline bool is_valid_effect_region(double t, double tau) {
  return tau >= 0.0 && tau <= std::min(t, 2.0 - t);
}

/// Matrix-convex combination
/// C_j = sqrt(A) U P_j U^dag sqrt(A) + sqrt(1-A) V Q_j V^dag sqrt(1-A).
inline Povm matrix_convex_combination(const Povm& p, const Povm& q, const Effect& a,
                                      const ComplexMatrix& u, const ComplexMatrix& v,
                                      double tol = kSumTol) {
  if (p.n() != q.n() || p.d() != q.d() || a.dim() != p.d())
    throw DimensionMismatch("matrix_convex_combination: shape mismatch");
  const auto d = p.d();
  const HermitianMatrix ra = sqrt_psd(a.matrix());
  const HermitianMatrix rb = sqrt_psd(HermitianMatrix::identity(d) - a.matrix());
  std::vector<HermitianMatrix> c;
  for (std::size_t j = 0; j < p.n(); ++j) {
    const HermitianMatrix up(u * p[j].matrix() * u.adjoint());
    const HermitianMatrix vq(v * q[j].matrix() * v.adjoint());
    c.push_back(congruence(ra, up) + congruence(rb, vq));
  }
  return validate_povm(c, tol);
}

}  // namespace povmdyn

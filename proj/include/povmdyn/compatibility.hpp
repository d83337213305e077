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

// Joint measurability: mother measurements, the conversion between mothers
// and stochastic matrices, and a Dykstra feasibility search.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "povmdyn/dynamics.hpp"
#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"

namespace povmdyn {

/// Marginal budget for mother measurements.
inline constexpr double kMotherTol = 1e-8;

using Grid = std::vector<std::vector<HermitianMatrix>>;

namespace detail {

inline Grid zero_grid(std::size_t rows, std::size_t cols, std::size_t d) {
  return Grid(rows, std::vector<HermitianMatrix>(cols, HermitianMatrix::zero(d)));
}

inline HermitianMatrix grid_row_sum(const Grid& g, std::size_t i) {
  HermitianMatrix s = HermitianMatrix::zero(g[i][0].dim());
  for (const auto& b : g[i]) s += b;
  return s;
}

inline HermitianMatrix grid_col_sum(const Grid& g, std::size_t j) {
  HermitianMatrix s = HermitianMatrix::zero(g[0][j].dim());
  for (const auto& row : g) s += row[j];
  return s;
}

inline HermitianMatrix project_psd(const HermitianMatrix& h) {
  const EigenSystem es = eig_h(h);
  if (es.eigenvalues(0) >= 0.0) return h;
  return apply_spectral(es, [](double x) { return x > 0.0 ? x : 0.0; });
}

}  // namespace detail

/// Rows index the outcomes of Q, columns those of P:
/// sum_i M_ij = P_j and sum_j M_ij = Q_i.
class MotherMeasurement {
 public:
  explicit MotherMeasurement(BlockMatrix blocks) : blocks_(std::move(blocks)) {}

  std::size_t rows() const { return blocks_.rows(); }
  std::size_t cols() const { return blocks_.cols(); }
  std::size_t d() const { return blocks_.d(); }
  const BlockMatrix& blocks() const { return blocks_; }
  const HermitianMatrix& operator()(std::size_t i, std::size_t j) const { return blocks_(i, j); }

  /// Largest entrywise deviation of the column marginals from P.
  double p_residual(const Povm& p) const {
    if (p.n() != cols() || p.d() != d()) throw DimensionMismatch("mother/P shape mismatch");
    double r = 0.0;
    for (std::size_t j = 0; j < cols(); ++j) r = std::max(r, max_abs_diff(blocks_.column_sum(j), p[j]));
    return r;
  }
  /// Largest entrywise deviation of the row marginals from Q.
  double q_residual(const Povm& q) const {
    if (q.n() != rows() || q.d() != d()) throw DimensionMismatch("mother/Q shape mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) r = std::max(r, max_abs_diff(blocks_.row_sum(i), q[i]));
    return r;
  }
  bool certifies(const Povm& p, const Povm& q, double tol = kMotherTol) const {
    return p_residual(p) <= tol && q_residual(q) <= tol;
  }
  /// Row marginals as a POVM.
  Povm q_marginal(double tol = kSumTol) const {
    std::vector<HermitianMatrix> e;
    for (std::size_t i = 0; i < rows(); ++i) e.push_back(blocks_.row_sum(i));
    return validate_povm(e, tol);
  }

 private:
  BlockMatrix blocks_;
};

/// M_ij = sqrt(P_j) S_ij sqrt(P_j).
inline MotherMeasurement mother_from_stochastic(const Povm& p, const BlockMatrix& s) {
  if (s.cols() != p.n() || s.d() != p.d()) throw DimensionMismatch("mother_from_stochastic: shape mismatch");
  if (!s.is_column_stochastic()) throw DomainError("mother_from_stochastic: S is not column-stochastic");
  std::vector<HermitianMatrix> roots;
  for (const auto& e : p.effects()) roots.push_back(sqrt_psd(e));
  Grid g(s.rows(), std::vector<HermitianMatrix>(s.cols()));
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) g[i][j] = congruence(roots[j], s(i, j));
  return MotherMeasurement(validate_block(std::move(g)));
}

/// S_ij = sqrt(P_j)^+ M_ij sqrt(P_j)^+ + p_i R_j with R_j the kernel
/// projector of P_j.
inline BlockMatrix stochastic_from_mother(const Povm& p, const MotherMeasurement& m,
                                          const std::vector<double>& p_dist,
                                          double tol = kMotherTol) {
  if (m.cols() != p.n() || m.d() != p.d() || p_dist.size() != m.rows())
    throw DimensionMismatch("stochastic_from_mother: shape mismatch");
  double total = 0.0;
  for (double x : p_dist) {
    if (x < 0.0) throw DomainError("stochastic_from_mother: p_dist has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("stochastic_from_mother: p_dist must sum to 1");
  const double res = m.p_residual(p);
  if (res > tol) {
    std::ostringstream os;
    os << "stochastic_from_mother: column marginals differ from P by " << res;
    throw DomainError(os.str());
  }
  const auto id = HermitianMatrix::identity(p.d());
  Grid g(m.rows(), std::vector<HermitianMatrix>(m.cols()));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const SupportInverse si = pinv_support(sqrt_psd(p[j]));
    const HermitianMatrix kernel = id - si.support;
    for (std::size_t i = 0; i < m.rows(); ++i) g[i][j] = congruence(si.pinv, m(i, j)) + p_dist[i] * kernel;
  }
  return validate_block(std::move(g));
}

/// Orthogonal projection onto {X : sum_j X_ij = r_i, sum_i X_ij = c_j},
/// optionally with some cells pinned to fixed values.
class MarginalProjector {
 public:
  /// Unmasked: closed-form two-sided mean correction.
  MarginalProjector(std::vector<HermitianMatrix> row_targets, std::vector<HermitianMatrix> col_targets)
      : r_(std::move(row_targets)), c_(std::move(col_targets)) {
    check();
  }

  /// fixed[i][j] set means X_ij is pinned to that value.
  MarginalProjector(std::vector<HermitianMatrix> row_targets, std::vector<HermitianMatrix> col_targets,
                    std::vector<std::vector<std::optional<HermitianMatrix>>> fixed)
      : r_(std::move(row_targets)), c_(std::move(col_targets)), fixed_(std::move(fixed)) {
    check();
    if (fixed_.size() != rows() || std::any_of(fixed_.begin(), fixed_.end(),
                                               [&](const auto& row) { return row.size() != cols(); }))
      throw DimensionMismatch("MarginalProjector: mask shape mismatch");
    masked_ = true;
    build_masked();
  }

  std::size_t rows() const { return r_.size(); }
  std::size_t cols() const { return c_.size(); }

  bool is_fixed(std::size_t i, std::size_t j) const { return masked_ && fixed_[i][j].has_value(); }

  Grid project(const Grid& x) const {
    check_grid(x);
    return masked_ ? project_masked(x) : project_closed(x);
  }

  /// Largest entrywise marginal deviation of x.
  double residual(const Grid& x) const {
    check_grid(x);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) worst = std::max(worst, max_abs_diff(detail::grid_row_sum(x, i), r_[i]));
    for (std::size_t j = 0; j < cols(); ++j) worst = std::max(worst, max_abs_diff(detail::grid_col_sum(x, j), c_[j]));
    return worst;
  }

 private:
  void check() const {
    if (r_.empty() || c_.empty()) throw DimensionMismatch("MarginalProjector: empty marginals");
    const auto d = r_[0].dim();
    for (const auto& h : r_)
      if (h.dim() != d) throw DimensionMismatch("MarginalProjector: dimension mismatch");
    for (const auto& h : c_)
      if (h.dim() != d) throw DimensionMismatch("MarginalProjector: dimension mismatch");
  }
  void check_grid(const Grid& x) const {
    if (x.size() != rows()) throw DimensionMismatch("MarginalProjector: grid shape mismatch");
    for (const auto& row : x)
      if (row.size() != cols()) throw DimensionMismatch("MarginalProjector: grid shape mismatch");
  }

  Grid project_closed(const Grid& x) const {
    const std::size_t n = rows(), m = cols();
    const auto d = r_[0].dim();
    std::vector<HermitianMatrix> rho, gam;
    HermitianMatrix s = HermitianMatrix::zero(d);
    for (std::size_t i = 0; i < n; ++i) {
      rho.push_back(r_[i] - detail::grid_row_sum(x, i));
      s += rho.back();
    }
    for (std::size_t j = 0; j < m; ++j) gam.push_back(c_[j] - detail::grid_col_sum(x, j));
    const double fn = static_cast<double>(n), fm = static_cast<double>(m);
    Grid out = x;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out[i][j] += rho[i] * (1.0 / fm) + gam[j] * (1.0 / fn) - s * (1.0 / (fn * fm));
    return out;
  }

  // Free cells only: x' = x + A^T (A A^T)^+ (t - A x), where A is the
  // row/column incidence of the free cells. A acts entrywise on blocks, so
  // K = (A A^T)^+ is a small real matrix.
  void build_masked() {
    const std::size_t n = rows(), m = cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + m), static_cast<Eigen::Index>(n + m));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (fixed_[i][j]) continue;
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(n + j);
        g(a, a) += 1.0;
        g(b, b) += 1.0;
        g(a, b) += 1.0;
        g(b, a) += 1.0;
      }
    }
    k_ = g.completeOrthogonalDecomposition().pseudoInverse();
  }

  Grid project_masked(const Grid& x) const {
    const std::size_t n = rows(), m = cols();
    const auto d = r_[0].dim();
    std::vector<HermitianMatrix> e;
    for (std::size_t i = 0; i < n; ++i) {
      HermitianMatrix acc = r_[i];
      for (std::size_t j = 0; j < m; ++j) acc -= fixed_[i][j] ? *fixed_[i][j] : x[i][j];
      e.push_back(std::move(acc));
    }
    for (std::size_t j = 0; j < m; ++j) {
      HermitianMatrix acc = c_[j];
      for (std::size_t i = 0; i < n; ++i) acc -= fixed_[i][j] ? *fixed_[i][j] : x[i][j];
      e.push_back(std::move(acc));
    }
    std::vector<HermitianMatrix> y(n + m, HermitianMatrix::zero(d));
    for (std::size_t a = 0; a < n + m; ++a)
      for (std::size_t b = 0; b < n + m; ++b) {
        const double w = k_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (w != 0.0) y[a] += w * e[b];
      }
    Grid out = x;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out[i][j] = fixed_[i][j] ? *fixed_[i][j] : x[i][j] + y[i] + y[n + j];
    return out;
  }

  std::vector<HermitianMatrix> r_, c_;
  std::vector<std::vector<std::optional<HermitianMatrix>>> fixed_;
  bool masked_ = false;
  Eigen::MatrixXd k_;
};

/// Orthogonal projection onto {X : sum_i X_ij = 1, sum_j R_j X_ij R_j = Q_i}
/// in Hilbert-Schmidt coordinates. Mother measurements are parameterized as
/// M_ij = R_j X_ij R_j with R_j = sqrt(P_j).
class CongruenceProjector {
 public:
  CongruenceProjector(std::vector<HermitianMatrix> roots, std::vector<HermitianMatrix> row_targets)
      : roots_(std::move(roots)), q_(std::move(row_targets)) {
    if (roots_.empty() || q_.empty()) throw DimensionMismatch("CongruenceProjector: empty marginals");
    d_ = roots_[0].dim();
    for (const auto& h : roots_)
      if (h.dim() != d_) throw DimensionMismatch("CongruenceProjector: dimension mismatch");
    for (const auto& h : q_)
      if (h.dim() != d_) throw DimensionMismatch("CongruenceProjector: dimension mismatch");
    build();
  }

  std::size_t rows() const { return q_.size(); }
  std::size_t cols() const { return roots_.size(); }
  bool is_fixed(std::size_t, std::size_t) const { return false; }

  Grid project(const Grid& x) const {
    const Eigen::VectorXd v = flatten(x);
    return unflatten(v + k_ * (b_ - a_ * v));
  }

  /// Largest entrywise deviation of the column sums from 1 and of the
  /// congruence row sums from Q.
  double residual(const Grid& x) const {
    const auto id = HermitianMatrix::identity(d_);
    double worst = 0.0;
    for (std::size_t j = 0; j < cols(); ++j) worst = std::max(worst, max_abs_diff(detail::grid_col_sum(x, j), id));
    for (std::size_t i = 0; i < rows(); ++i) {
      HermitianMatrix acc = HermitianMatrix::zero(d_);
      for (std::size_t j = 0; j < cols(); ++j) acc += congruence(roots_[j], x[i][j]);
      worst = std::max(worst, max_abs_diff(acc, q_[i]));
    }
    return worst;
  }

  /// M_ij = R_j X_ij R_j.
  Grid mother(const Grid& x) const {
    Grid out = x;
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) out[i][j] = congruence(roots_[j], x[i][j]);
    return out;
  }

 private:
  Eigen::Index dd() const { return static_cast<Eigen::Index>(d_ * d_); }

  void put(const HermitianMatrix& h, Eigen::VectorXd& v, Eigen::Index off) const {
    const auto d = static_cast<Eigen::Index>(d_);
    Eigen::Index k = off;
    for (Eigen::Index a = 0; a < d; ++a) {
      v(k++) = h.matrix()(a, a).real();
      for (Eigen::Index b = a + 1; b < d; ++b) {
        v(k++) = std::sqrt(2.0) * h.matrix()(a, b).real();
        v(k++) = std::sqrt(2.0) * h.matrix()(a, b).imag();
      }
    }
  }

  HermitianMatrix get(const Eigen::VectorXd& v, Eigen::Index off) const {
    const auto d = static_cast<Eigen::Index>(d_);
    ComplexMatrix m(d, d);
    Eigen::Index k = off;
    for (Eigen::Index a = 0; a < d; ++a) {
      m(a, a) = v(k++);
      for (Eigen::Index b = a + 1; b < d; ++b) {
        const double re = v(k++) / std::sqrt(2.0), im = v(k++) / std::sqrt(2.0);
        m(a, b) = Complex(re, im);
        m(b, a) = Complex(re, -im);
      }
    }
    return HermitianMatrix(m);
  }

  Eigen::VectorXd flatten(const Grid& x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows() * cols()) * dd());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) put(x[i][j], v, static_cast<Eigen::Index>(i * cols() + j) * dd());
    return v;
  }

  Grid unflatten(const Eigen::VectorXd& v) const {
    Grid g(rows(), std::vector<HermitianMatrix>(cols()));
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) g[i][j] = get(v, static_cast<Eigen::Index>(i * cols() + j) * dd());
    return g;
  }

  // Rows of A: column-sum constraints (cols() blocks) then congruence
  // row-sum constraints (rows() blocks).
  void build() {
    const std::size_t n = rows(), m = cols();
    const Eigen::Index nv = static_cast<Eigen::Index>(n * m) * dd();
    const Eigen::Index nc = static_cast<Eigen::Index>(n + m) * dd();
    a_ = Eigen::MatrixXd::Zero(nc, nv);
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(dd()), img(dd());
    for (Eigen::Index k = 0; k < dd(); ++k) {
      basis.setZero();
      basis(k) = 1.0;
      const HermitianMatrix e = get(basis, 0);
      for (std::size_t j = 0; j < m; ++j) {
        put(congruence(roots_[j], e), img, 0);
        for (std::size_t i = 0; i < n; ++i) {
          const Eigen::Index col = static_cast<Eigen::Index>(i * m + j) * dd() + k;
          a_(static_cast<Eigen::Index>(j) * dd() + k, col) = 1.0;
          a_.block(static_cast<Eigen::Index>(m + i) * dd(), col, dd(), 1) = img;
        }
      }
    }
    b_.resize(nc);
    for (std::size_t j = 0; j < m; ++j) put(HermitianMatrix::identity(d_), b_, static_cast<Eigen::Index>(j) * dd());
    for (std::size_t i = 0; i < n; ++i) put(q_[i], b_, static_cast<Eigen::Index>(m + i) * dd());
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a_ * a_.transpose());
    cod.setThreshold(1e-12);
    k_ = a_.transpose() * cod.pseudoInverse();
  }

  std::vector<HermitianMatrix> roots_, q_;
  std::size_t d_ = 0;
  Eigen::MatrixXd a_, k_;
  Eigen::VectorXd b_;
};

struct DykstraResult {
  Grid point;           // PSD iterate
  std::size_t iterations;
  double residual;      // marginal residual of point
  bool converged;
};

/// Dykstra alternating projections between the blockwise PSD cone and the
/// affine set of proj, started from x0. Pinned cells are left untouched.
template <typename Projector>
DykstraResult dykstra_marginals(const Projector& proj, Grid x0, std::size_t budget, double tol) {
  const std::size_t n = proj.rows(), m = proj.cols();
  Grid x = proj.project(x0);
  const auto d = x[0][0].dim();
  Grid corr = detail::zero_grid(n, m, d);
  Grid y = x;
  double res = 0.0;
  for (std::size_t it = 1; it <= budget; ++it) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (proj.is_fixed(i, j)) {
          y[i][j] = x[i][j];
          continue;
        }
        const HermitianMatrix z = x[i][j] + corr[i][j];
        y[i][j] = detail::project_psd(z);
        corr[i][j] = z - y[i][j];
      }
    res = proj.residual(y);
    if (res <= tol) return {std::move(y), it, res, true};
    x = proj.project(y);
  }
  return {std::move(y), budget, res, false};
}

struct IncompatibilityCertificate {
  std::size_t p_index;
  std::size_t q_index;
  double commutator_norm;
  std::string describe() const {
    std::ostringstream os;
    os << "projective POVMs with non-commuting effects P_" << p_index + 1 << ", Q_" << q_index + 1
       << " (||[P,Q]||_2 = " << commutator_norm << ")";
    return os.str();
  }
};

/// Exact test for projective pairs: compatible iff all effects commute.
inline std::optional<IncompatibilityCertificate> projective_incompatibility_test(const Povm& p, const Povm& q,
                                                                                 double tol = kPsdTol) {
  if (p.d() != q.d()) return std::nullopt;
  auto projective = [tol](const Povm& x) {
    return std::all_of(x.effects().begin(), x.effects().end(), [tol](const HermitianMatrix& e) {
      return (e.matrix() * e.matrix() - e.matrix()).norm() <= tol;
    });
  };
  if (!projective(p) || !projective(q)) return std::nullopt;
  std::optional<IncompatibilityCertificate> worst;
  for (std::size_t j = 0; j < p.n(); ++j)
    for (std::size_t i = 0; i < q.n(); ++i) {
      const double c = commutator_norm(p[j], q[i]);
      if (c > tol && (!worst || c > worst->commutator_norm)) worst = IncompatibilityCertificate{j, i, c};
    }
  return worst;
}

struct CompatVerdict {
  enum class Status { kFeasible, kInfeasible, kUnknown };
  Status status;
  std::optional<MotherMeasurement> witness;
  std::optional<IncompatibilityCertificate> certificate;
  std::size_t iterations = 0;
  double residual = 0.0;
};

inline const char* to_string(CompatVerdict::Status s) {
  switch (s) {
    case CompatVerdict::Status::kFeasible: return "feasible";
    case CompatVerdict::Status::kInfeasible: return "infeasible";
    case CompatVerdict::Status::kUnknown: return "unknown";
  }
  return "unknown";
}

inline constexpr std::size_t kCompatBudget = 5000;
inline constexpr double kCompatTol = 1e-7;

/// Searches for a mother of P (columns) and Q (rows).
inline CompatVerdict decide_compatibility(const Povm& p, const Povm& q, std::size_t budget = kCompatBudget,
                                          double tol = kCompatTol) {
  if (p.d() != q.d()) throw DimensionMismatch("decide_compatibility: dimension mismatch");
  if (auto cert = projective_incompatibility_test(p, q))
    return {CompatVerdict::Status::kInfeasible, std::nullopt, cert, 0, 0.0};

  const std::size_t n = q.n(), m = p.n();
  const double accept = std::max(kMotherTol, tol);
  auto try_witness = [&](const Grid& g) -> std::optional<MotherMeasurement> {
    for (const auto& row : g)
      for (const auto& b : row)
        if (!is_psd(b)) return std::nullopt;
    MotherMeasurement mm(validate_block(g));
    if (!mm.certifies(p, q, accept)) return std::nullopt;
    return mm;
  };

  std::vector<HermitianMatrix> rp, rq;
  for (const auto& e : p.effects()) rp.push_back(sqrt_psd(e));
  for (const auto& e : q.effects()) rq.push_back(sqrt_psd(e));
  Grid a(n, std::vector<HermitianMatrix>(m)), b = a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = congruence(rp[j], q[i]);
      b[i][j] = congruence(rq[i], p[j]);
    }
  if (n == m) {
    Grid diag = detail::zero_grid(n, m, p.d());
    for (std::size_t j = 0; j < m; ++j) diag[j][j] = 0.5 * (p[j] + q[j]);
    if (auto w = try_witness(diag)) return {CompatVerdict::Status::kFeasible, std::move(w), std::nullopt, 0, 0.0};
  }
  if (auto w = try_witness(a)) return {CompatVerdict::Status::kFeasible, std::move(w), std::nullopt, 0, 0.0};
  if (auto w = try_witness(b)) return {CompatVerdict::Status::kFeasible, std::move(w), std::nullopt, 0, 0.0};

  // Dykstra in the M_ij = sqrt(P_j) X_ij sqrt(P_j) parameterization, or
  // with the roles of P and Q swapped when Q has the smaller effect
  // eigenvalue. Started from X_ij = Q_i.
  auto floor = [](const Povm& x) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& e : x.effects()) v = std::min(v, lambda_min(e));
    return v;
  };
  const bool swap = floor(q) < floor(p);
  const Povm& col = swap ? q : p;
  const Povm& row = swap ? p : q;
  const CongruenceProjector proj(swap ? rq : rp, row.effects());
  Grid x0(row.n(), std::vector<HermitianMatrix>(col.n()));
  for (std::size_t i = 0; i < row.n(); ++i)
    for (std::size_t j = 0; j < col.n(); ++j) x0[i][j] = row[i];
  auto mother = [&](const Grid& x) {
    Grid g = proj.mother(x);
    if (!swap) return g;
    Grid t(n, std::vector<HermitianMatrix>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) t[i][j] = g[j][i];
    return t;
  };
  DykstraResult dr = dykstra_marginals(proj, std::move(x0), budget, tol);
  if (dr.converged) {
    if (auto w = try_witness(mother(proj.project(dr.point)))) {
      const double r = std::max(w->p_residual(p), w->q_residual(q));
      return {CompatVerdict::Status::kFeasible, std::move(w), std::nullopt, dr.iterations, r};
    }
    if (auto w = try_witness(mother(dr.point)))
      return {CompatVerdict::Status::kFeasible, std::move(w), std::nullopt, dr.iterations, dr.residual};
  }
  return {CompatVerdict::Status::kUnknown, std::nullopt, std::nullopt, dr.iterations, dr.residual};
}

}  // namespace povmdyn

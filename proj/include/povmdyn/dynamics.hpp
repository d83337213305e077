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

// Blockwise product, its dual, the sequential product and Lueders
// two-stage measurement simulation.

#pragma once

#include <cstddef>
#include <vector>

#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"

namespace povmdyn {

/// Budget for probabilities that should be positive.
inline constexpr double kProbTol = 1e-12;

class OutcomeProbabilityZero : public DomainError {
 public:
  using DomainError::DomainError;
};

/// sqrt(A) B sqrt(A).
inline HermitianMatrix seq_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("seq_product: dimension mismatch");
  return congruence(sqrt_psd(a), b);
}

namespace detail {

inline std::vector<HermitianMatrix> block_roots(const BlockMatrix& m) {
  std::vector<HermitianMatrix> r;
  r.reserve(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(sqrt_psd(m(i, j)));
  return r;
}

inline void check_chain(const BlockMatrix& a, const BlockMatrix& b, const char* op) {
  if (a.cols() != b.rows() || a.d() != b.d()) {
    std::ostringstream os;
    os << op << ": cannot multiply " << a.rows() << "x" << a.cols() << " (d=" << a.d() << ") by "
       << b.rows() << "x" << b.cols() << " (d=" << b.d() << ")";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace detail

/// (A * B)_ik = sum_j sqrt(B_jk) A_ij sqrt(B_jk).
inline BlockMatrix blockwise_product(const BlockMatrix& a, const BlockMatrix& b) {
  detail::check_chain(a, b, "blockwise_product");
  const auto rb = detail::block_roots(b);
  std::vector<std::vector<HermitianMatrix>> out(a.rows(), std::vector<HermitianMatrix>(b.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < b.cols(); ++k) {
      HermitianMatrix s = HermitianMatrix::zero(a.d());
      for (std::size_t j = 0; j < a.cols(); ++j) s += congruence(rb[j * b.cols() + k], a(i, j));
      out[i][k] = std::move(s);
    }
  }
  return validate_block(std::move(out));
}

/// S * P for a column-stochastic S: Q_i = sum_j sqrt(P_j) S_ij sqrt(P_j).
inline Povm blockwise_product(const BlockMatrix& s, const Povm& p, double tol = kSumTol) {
  const BlockMatrix q = blockwise_product(s, BlockMatrix::from_povm(p));
  return q.column(0, tol);
}

/// (A *dag B)_ik = sum_j sqrt(A_ij) B_jk sqrt(A_ij), i.e. (B^dag * A^dag)^dag.
inline BlockMatrix dual_blockwise_product(const BlockMatrix& a, const BlockMatrix& b) {
  detail::check_chain(a, b, "dual_blockwise_product");
  const auto ra = detail::block_roots(a);
  std::vector<std::vector<HermitianMatrix>> out(a.rows(), std::vector<HermitianMatrix>(b.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < b.cols(); ++k) {
      HermitianMatrix s = HermitianMatrix::zero(a.d());
      for (std::size_t j = 0; j < a.cols(); ++j) s += congruence(ra[i * a.cols() + j], b(j, k));
      out[i][k] = std::move(s);
    }
  }
  return validate_block(std::move(out));
}

/// The n = 2 bistochastic matrix ((B, 1-B), (1-B, B)).
inline BlockMatrix two_outcome_bistochastic(const Effect& b) {
  const auto one = HermitianMatrix::identity(b.dim());
  const HermitianMatrix c = one - b.matrix();
  return validate_block({{b.matrix(), c}, {c, b.matrix()}});
}

/// Xi(B, P) = sqrt(B) P sqrt(B) + sqrt(1-B) (1-P) sqrt(1-B): the first effect
/// of ((B, 1-B), (1-B, B)) *dag (P, 1-P).
inline HermitianMatrix xi_combination(const Effect& b, const Effect& p) {
  if (b.dim() != p.dim()) throw DimensionMismatch("xi_combination: dimension mismatch");
  const auto one = HermitianMatrix::identity(b.dim());
  return congruence(sqrt_psd(b.matrix()), p.matrix()) +
         congruence(sqrt_psd(one - b.matrix()), one - p.matrix());
}

/// First effect of ((B, 1-B), (1-B, B)) * (P, 1-P):
/// sqrt(P) B sqrt(P) + sqrt(1-P) (1-B) sqrt(1-P).
inline HermitianMatrix star_combination(const Effect& b, const Effect& p) {
  if (b.dim() != p.dim()) throw DimensionMismatch("star_combination: dimension mismatch");
  const auto one = HermitianMatrix::identity(b.dim());
  return congruence(sqrt_psd(p.matrix()), b.matrix()) +
         congruence(sqrt_psd(one - p.matrix()), one - b.matrix());
}

/// B_ij = P_{(i + j) mod n}; bistochastic, and B * V_1 = P.
inline BlockMatrix circulant_from_povm(const Povm& p) {
  const std::size_t n = p.n();
  std::vector<std::vector<HermitianMatrix>> g(n, std::vector<HermitianMatrix>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = p[(i + j) % n];
  return validate_block(std::move(g));
}

struct PostMeasurement {
  DensityMatrix state;
  double prob;
};

/// Lueders update sqrt(P) rho sqrt(P) / tr(P rho).
inline PostMeasurement luders_post_state(const DensityMatrix& rho, const Effect& p,
                                         double tol = kProbTol) {
  if (rho.dim() != p.dim()) throw DimensionMismatch("luders_post_state: dimension mismatch");
  const double prob = expectation(p.matrix(), rho);
  if (prob <= tol) {
    std::ostringstream os;
    os << "outcome probability " << prob << " is not above " << tol;
    throw OutcomeProbabilityZero(os.str());
  }
  return {DensityMatrix(congruence(sqrt_psd(p.matrix()), rho.matrix()) * (1.0 / prob)), prob};
}

struct TwoStageResult {
  std::vector<std::vector<double>> joint;  // joint[j][i] = prob(first j, second i)
  Povm effective;                          // S * P
  std::vector<double> marginal_second;     // sum_j joint[j][i]
};

/// Measures P, then the column S_{.j} selected by the first outcome j.
inline TwoStageResult two_stage_run(const DensityMatrix& rho, const Povm& p, const BlockMatrix& s) {
  if (s.cols() != p.n() || s.d() != p.d() || rho.dim() != p.d())
    throw DimensionMismatch("two_stage_run: shape mismatch");
  if (!s.is_column_stochastic()) throw DomainError("two_stage_run: S is not column-stochastic");
  const std::size_t n = p.n();
  const std::size_t m = s.rows();
  std::vector<std::vector<double>> joint(n, std::vector<double>(m, 0.0));
  std::vector<double> marginal(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const HermitianMatrix post = congruence(sqrt_psd(p[j]), rho.matrix());
    for (std::size_t i = 0; i < m; ++i) {
      double v = hs_inner(s(i, j), post);
      if (v < 0.0) {
        if (v < -kProbTol) {
          std::ostringstream os;
          os << "two_stage_run: joint probability " << v << " at (" << j << "," << i << ")";
          throw NumericFailure(os.str());
        }
        v = 0.0;
      }
      joint[j][i] = v;
      marginal[i] += v;
    }
  }
  return {std::move(joint), blockwise_product(s, p), std::move(marginal)};
}

}  // namespace povmdyn

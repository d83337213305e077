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

#include <gtest/gtest.h>

#include <cmath>

#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"
#include "test_util.hpp"

namespace povmdyn {
namespace {

using testing::Near;

TEST(HermitianMatrix, SymmetrizesOnConstruction) {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(2.0, 1.0), Complex(0.0, 0.0), 3.0;
  const HermitianMatrix h(m);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
  EXPECT_EQ(h(0, 1), Complex(1.0, 0.5));
}

TEST(HermitianMatrix, RejectsNonSquareAndEmpty) {
  EXPECT_THROW(HermitianMatrix(ComplexMatrix(2, 3)), DimensionMismatch);
  EXPECT_THROW(HermitianMatrix(ComplexMatrix(0, 0)), DimensionMismatch);
}

TEST(HermitianMatrix, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(HermitianMatrix{m}, NumericFailure);
}

TEST(EigH, Identity) {
  const EigenSystem es = eig_h(HermitianMatrix::identity(2));
  EXPECT_DOUBLE_EQ(es.eigenvalues(0), 1.0);
  EXPECT_DOUBLE_EQ(es.eigenvalues(1), 1.0);
}

TEST(EigH, SigmaZAscending) {
  const EigenSystem es = eig_h(pauli::sigma_z());
  EXPECT_DOUBLE_EQ(es.eigenvalues(0), -1.0);
  EXPECT_DOUBLE_EQ(es.eigenvalues(1), 1.0);
}

TEST(EigH, ProjectorXPlus) {
  const EigenSystem es = eig_h(pauli::x_plus());
  EXPECT_NEAR(es.eigenvalues(0), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues(1), 1.0, 1e-15);
}

TEST(EigH, ReconstructionAndUnitarity) {
  SeededRng rng(11);
  for (std::size_t d : {1, 2, 3, 4, 6}) {
    for (int rep = 0; rep < 20; ++rep) {
      const HermitianMatrix h = testing::random_hermitian(d, rng);
      const EigenSystem es = eig_h(h);
      const ComplexMatrix v = es.eigenvectors;
      const ComplexMatrix rec = v * es.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
      EXPECT_LE((rec - h.matrix()).norm(), 1e-10 * std::max(1.0, spectral_norm(h)));
      EXPECT_LE((v.adjoint() * v - ComplexMatrix::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff(), 1e-10);
      for (Eigen::Index k = 1; k < es.eigenvalues.size(); ++k) EXPECT_LE(es.eigenvalues(k - 1), es.eigenvalues(k));
      EXPECT_NEAR(es.eigenvalues.sum(), h.trace(), 1e-10 * std::max(1.0, std::abs(h.trace())));
    }
  }
}

TEST(IsPsd, Examples) {
  EXPECT_TRUE(is_psd(HermitianMatrix::zero(2), 1e-9));
  EXPECT_FALSE(is_psd(pauli::sigma_z(), 1e-9));
  EXPECT_TRUE(is_psd(pauli::x_minus(), 1e-9));
}

TEST(IsPsd, RelativeTolerance) {
  const HermitianMatrix big = HermitianMatrix::diagonal({1e6, -1e-4});
  EXPECT_TRUE(is_psd(big, 1e-9 * 1e3));
  EXPECT_FALSE(is_psd(big, 1e-11));
  EXPECT_TRUE(is_psd(HermitianMatrix::diagonal({1.0, -5e-10}), 1e-9));
}

TEST(SqrtPsd, Examples) {
  EXPECT_TRUE(Near(sqrt_psd(HermitianMatrix::identity(3)), HermitianMatrix::identity(3), 1e-15));
  EXPECT_TRUE(Near(sqrt_psd(HermitianMatrix::diagonal({4.0, 0.0})), HermitianMatrix::diagonal({2.0, 0.0}), 1e-15));
  EXPECT_TRUE(Near(sqrt_psd(pauli::x_plus()), pauli::x_plus(), 1e-15));
}

TEST(SqrtPsd, RejectsIndefinite) {
  try {
    sqrt_psd(pauli::sigma_z());
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda_min"), std::string::npos);
  }
}

TEST(SqrtPsd, ClampsDust) {
  const HermitianMatrix r = sqrt_psd(HermitianMatrix::diagonal({1.0, -1e-12}));
  EXPECT_TRUE(Near(r, HermitianMatrix::diagonal({1.0, 0.0}), 1e-15));
}

TEST(SqrtPsd, SquaresBack) {
  SeededRng rng(5);
  for (std::size_t d : {2, 3, 5}) {
    for (int rep = 0; rep < 20; ++rep) {
      const HermitianMatrix h = testing::random_psd(d, rng);
      const HermitianMatrix r = sqrt_psd(h);
      EXPECT_TRUE(is_psd(r));
      EXPECT_LE((r.matrix() * r.matrix() - h.matrix()).norm(), 1e-9 * std::max(1.0, spectral_norm(h)));
    }
  }
}

TEST(PinvSupport, Examples) {
  const auto a = pinv_support(HermitianMatrix::diagonal({2.0, 0.0}));
  EXPECT_TRUE(Near(a.pinv, HermitianMatrix::diagonal({0.5, 0.0}), 1e-15));
  EXPECT_TRUE(Near(a.support, HermitianMatrix::diagonal({1.0, 0.0}), 1e-15));
  const auto b = pinv_support(HermitianMatrix::identity(2));
  EXPECT_TRUE(Near(b.pinv, HermitianMatrix::identity(2), 1e-15));
  EXPECT_TRUE(Near(b.support, HermitianMatrix::identity(2), 1e-15));
  const auto c = pinv_support(pauli::x_plus());
  EXPECT_TRUE(Near(c.pinv, pauli::x_plus(), 1e-14));
  EXPECT_TRUE(Near(c.support, pauli::x_plus(), 1e-14));
  const auto z = pinv_support(HermitianMatrix::zero(3));
  EXPECT_TRUE(Near(z.pinv, HermitianMatrix::zero(3), 0.0));
  EXPECT_TRUE(Near(z.support, HermitianMatrix::zero(3), 0.0));
}

TEST(PinvSupport, RoundTripOnRankDeficient) {
  SeededRng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    // rank-2 PSD in d = 4
    ComplexMatrix x = ginibre_matrix(4, rng).topRows(2);
    const HermitianMatrix h(x.adjoint() * x);
    const auto si = pinv_support(h);
    const ComplexMatrix& hm = h.matrix();
    EXPECT_LE((hm * si.pinv.matrix() * hm - hm).norm(), 1e-8 * std::max(1.0, spectral_norm(h)));
    EXPECT_LE((si.pinv.matrix() * hm - si.support.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((hm * si.pinv.matrix() - si.support.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((si.support.matrix() * si.support.matrix() - si.support.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(si.support.trace(), 2.0, 1e-9);
  }
}

TEST(LoewnerLeq, Examples) {
  EXPECT_TRUE(loewner_leq(HermitianMatrix::zero(2), HermitianMatrix::identity(2)));
  EXPECT_FALSE(loewner_leq(pauli::z_plus(), pauli::z_minus()));
  EXPECT_TRUE(loewner_leq(0.3 * HermitianMatrix::identity(2), 0.7 * HermitianMatrix::identity(2)));
  EXPECT_THROW(loewner_leq(HermitianMatrix::zero(2), HermitianMatrix::zero(3)), DimensionMismatch);
}

TEST(HsNorm, Examples) {
  EXPECT_NEAR(hs_norm(HermitianMatrix::identity(2)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hs_norm(pauli::sigma_z()), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hs_norm(pauli::x_plus() - 0.5 * HermitianMatrix::identity(2)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hs_norm(HermitianMatrix::identity(5)), std::sqrt(5.0), 1e-15);
  EXPECT_THROW(hs_inner(HermitianMatrix::zero(2), HermitianMatrix::zero(3)), DimensionMismatch);
}

TEST(HsNorm, SquareIsSelfInner) {
  SeededRng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const HermitianMatrix a = testing::random_hermitian(3, rng);
    EXPECT_NEAR(hs_norm(a) * hs_norm(a), hs_inner(a, a), 1e-12 * hs_inner(a, a));
  }
}

TEST(Properties, SequentialProductPreservesPositivity) {
  SeededRng rng(21);
  for (std::size_t d : {2, 3, 4}) {
    for (int rep = 0; rep < 50; ++rep) {
      const HermitianMatrix a = testing::random_psd(d, rng), b = testing::random_psd(d, rng);
      EXPECT_TRUE(is_psd(congruence(sqrt_psd(a), b)));
    }
  }
}

TEST(Properties, WeylLowerBound) {
  SeededRng rng(22);
  for (std::size_t d : {2, 3, 4}) {
    for (int rep = 0; rep < 100; ++rep) {
      const HermitianMatrix a = testing::random_hermitian(d, rng), b = testing::random_hermitian(d, rng);
      EXPECT_GE(lambda_min(a + b), lambda_min(a) + lambda_min(b) - 1e-9);
    }
  }
}

TEST(Commutator, DiagonalMatricesCommute) {
  EXPECT_EQ(commutator_norm(HermitianMatrix::diagonal({1.0, 2.0}), HermitianMatrix::diagonal({3.0, 4.0})), 0.0);
  EXPECT_NEAR(commutator_norm(pauli::z_plus(), pauli::x_plus()), std::sqrt(2.0) / 2.0, 1e-15);
}

}  // namespace
}  // namespace povmdyn

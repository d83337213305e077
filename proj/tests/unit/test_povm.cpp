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

#include "povmdyn/povm.hpp"
#include "povmdyn/sampling.hpp"
#include "test_util.hpp"

namespace povmdyn {
namespace {

using testing::Near;

TEST(ValidatePovm, SingleIdentity) {
  const Povm p = validate_povm({HermitianMatrix::identity(3)});
  EXPECT_EQ(p.n(), 1u);
  EXPECT_EQ(p.d(), 3u);
}

TEST(ValidatePovm, PauliZ) { EXPECT_NO_THROW(validate_povm({pauli::z_plus(), pauli::z_minus()})); }

TEST(ValidatePovm, SumNotIdentity) {
  try {
    validate_povm({HermitianMatrix::identity(2), HermitianMatrix::identity(2)});
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].kind, Violation::Kind::kSumNotIdentity);
    EXPECT_DOUBLE_EQ(e.violations()[0].value, 1.0);
  }
}

TEST(ValidatePovm, ListsEveryViolation) {
  try {
    validate_povm({pauli::sigma_z(), HermitianMatrix::identity(2), -1.0 * pauli::z_plus()});
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 3u);
    EXPECT_EQ(e.violations()[0].kind, Violation::Kind::kNonPsdEffect);
    EXPECT_EQ(e.violations()[0].row, 0u);
    EXPECT_DOUBLE_EQ(e.violations()[0].value, -1.0);
    EXPECT_EQ(e.violations()[1].kind, Violation::Kind::kNonPsdEffect);
    EXPECT_EQ(e.violations()[1].row, 2u);
    EXPECT_EQ(e.violations()[2].kind, Violation::Kind::kSumNotIdentity);
  }
}

TEST(ValidatePovm, DimensionMismatchAndEmpty) {
  try {
    validate_povm({HermitianMatrix::identity(2), HermitianMatrix::zero(3)});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations()[0].kind, Violation::Kind::kDimensionMismatch);
  }
  EXPECT_THROW(validate_povm(std::vector<HermitianMatrix>{}), ValidationError);
}

TEST(ValidateBlock, TwoByTwoBistochastic) {
  const HermitianMatrix b = HermitianMatrix{{0.7, Complex(0.1, 0.2)}, {Complex(0.1, -0.2), 0.4}};
  const HermitianMatrix c = HermitianMatrix::identity(2) - b;
  const BlockMatrix m = validate_block({{b, c}, {c, b}});
  EXPECT_EQ(m.kind(), BlockKind::kBistochastic);
}

TEST(ValidateBlock, PauliColumnsAreStochasticOnly) {
  using namespace pauli;
  const BlockMatrix m = validate_block({{z_plus(), x_plus()}, {z_minus(), x_minus()}});
  EXPECT_EQ(m.kind(), BlockKind::kStochastic);
  EXPECT_TRUE(m.is_column_stochastic());
  // row 0 sums to P_{Z+} + P_{X+} = [[1.5, .5], [.5, .5]]
  EXPECT_TRUE(Near(m.row_sum(0), HermitianMatrix{{1.5, 0.5}, {0.5, 0.5}}, 1e-15));
  EXPECT_DOUBLE_EQ(m.row_deviation(), 0.5);
}

TEST(ValidateBlock, IdentityIsBistochastic) {
  EXPECT_EQ(BlockMatrix::identity(3, 2).kind(), BlockKind::kBistochastic);
  EXPECT_EQ(BlockMatrix::flat(3, 2).kind(), BlockKind::kBistochastic);
}

TEST(ValidateBlock, NonSquareNeverBistochastic) {
  const auto id = HermitianMatrix::identity(2);
  const BlockMatrix m = validate_block({{id, id, id}, {HermitianMatrix::zero(2), HermitianMatrix::zero(2), HermitianMatrix::zero(2)}});
  EXPECT_EQ(m.kind(), BlockKind::kStochastic);
}

TEST(ValidateBlock, Errors) {
  try {
    validate_block({{pauli::sigma_z(), HermitianMatrix::identity(2)}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations()[0].kind, Violation::Kind::kNonPsdBlock);
    EXPECT_EQ(e.violations()[0].col, 0u);
  }
  EXPECT_THROW(validate_block({{HermitianMatrix::identity(2)}, {HermitianMatrix::identity(2), HermitianMatrix::identity(2)}}),
               ValidationError);
  EXPECT_THROW(validate_block({{HermitianMatrix::identity(2), HermitianMatrix::identity(3)}}), ValidationError);
}

TEST(BlockMatrix, GeneralKindAndAdjoint) {
  const auto id = HermitianMatrix::identity(2);
  const BlockMatrix m = validate_block({{id, id}, {id, id}});
  EXPECT_EQ(m.kind(), BlockKind::kGeneral);
  const BlockMatrix a = validate_block({{pauli::z_plus(), pauli::x_plus(), id}, {pauli::z_minus(), pauli::x_minus(), id}});
  const BlockMatrix t = a.adjoint();
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.cols(), 2u);
  EXPECT_TRUE(Near(t(1, 0), pauli::x_plus(), 0.0));
}

TEST(FuzzyPovm, Examples) {
  const Povm a = fuzzy_povm(0, 2, 2);
  EXPECT_TRUE(Near(a[0], HermitianMatrix::identity(2), 0.0));
  EXPECT_TRUE(Near(a[1], HermitianMatrix::zero(2), 0.0));
  const Povm b = fuzzy_povm(1, 2, 2);
  EXPECT_TRUE(Near(b[1], HermitianMatrix::identity(2), 0.0));
  const Povm c = fuzzy_povm(0, 1, 3);
  EXPECT_EQ(c.n(), 1u);
  EXPECT_TRUE(Near(c[0], HermitianMatrix::identity(3), 0.0));
  EXPECT_THROW(fuzzy_povm(2, 2, 2), DomainError);
}

TEST(UniformPovm, Examples) {
  const Povm u = uniform_povm(2, 2);
  EXPECT_TRUE(Near(u[0], 0.5 * HermitianMatrix::identity(2), 0.0));
  EXPECT_TRUE(Near(uniform_povm(1, 4)[0], HermitianMatrix::identity(4), 0.0));
  const Povm t = uniform_povm(3, 2);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(Near(t[j], HermitianMatrix::identity(2) * (1.0 / 3.0), 0.0));
  // exact-sum validation
  EXPECT_NO_THROW(validate_povm(uniform_povm(4, 3).effects(), 0.0));
  EXPECT_NO_THROW(validate_povm(fuzzy_povm(2, 4, 3).effects(), 0.0));
}

TEST(PauliPovms, Entries) {
  const PauliPovms pp = pauli_povms();
  EXPECT_TRUE(Near(pp.x[0], HermitianMatrix{{0.5, 0.5}, {0.5, 0.5}}, 0.0));
  EXPECT_TRUE(Near(pp.x[1], HermitianMatrix{{0.5, -0.5}, {-0.5, 0.5}}, 0.0));
  EXPECT_TRUE(Near(pp.z[0], HermitianMatrix::diagonal({1.0, 0.0}), 0.0));
  EXPECT_TRUE(Near(pp.z[1], HermitianMatrix::diagonal({0.0, 1.0}), 0.0));
  EXPECT_TRUE(Near(pp.y[0], HermitianMatrix{{0.5, Complex(0, -0.5)}, {Complex(0, 0.5), 0.5}}, 0.0));
  EXPECT_TRUE(Near(pp.flat, uniform_povm(2, 2), 0.0));
  for (const Povm* p : {&pp.x, &pp.y, &pp.z})
    for (const auto& e : p->effects()) {
      EXPECT_LE((e.matrix() * e.matrix() - e.matrix()).norm(), 1e-15);
      EXPECT_NEAR(e.trace(), 1.0, 1e-15);
    }
}

TEST(ConeCoordinates, Examples) {
  const ConeCoords c = cone_coordinates(Effect(0.5 * HermitianMatrix::identity(2)));
  EXPECT_DOUBLE_EQ(c.t, 1.0);
  EXPECT_DOUBLE_EQ(c.tau, 0.0);
  const ConeCoords z = cone_coordinates(Effect(pauli::z_plus()));
  EXPECT_DOUBLE_EQ(z.t, 1.0);
  EXPECT_DOUBLE_EQ(z.tau, 1.0);
  const ConeCoords o = cone_coordinates(Effect(HermitianMatrix::zero(2)));
  EXPECT_DOUBLE_EQ(o.t, 0.0);
  EXPECT_DOUBLE_EQ(o.tau, 0.0);
  EXPECT_THROW(cone_coordinates(Effect(HermitianMatrix::zero(3))), DimensionMismatch);
}

TEST(EffectRegion, Examples) {
  EXPECT_TRUE(is_valid_effect_region(1.0, 1.0));
  EXPECT_FALSE(is_valid_effect_region(0.5, 0.8));
  EXPECT_TRUE(is_valid_effect_region(2.0, 0.0));
}

TEST(EffectRegion, RandomEffectsInsideCone) {
  SeededRng rng(31);
  for (int rep = 0; rep < 500; ++rep) {
    const Effect e = rng.uniform() < 0.5 ? ginibre_effect(2, rng)
                                          : Effect(HermitianMatrix::identity(2) - ginibre_effect(2, rng).matrix());
    const ConeCoords c = cone_coordinates(e);
    EXPECT_LE(c.tau, std::min(c.t, 2.0 - c.t) + 1e-12);
  }
}

TEST(Effect, RejectsOutOfRange) {
  EXPECT_THROW(Effect(2.0 * HermitianMatrix::identity(2)), DomainError);
  EXPECT_THROW(Effect(pauli::sigma_z()), DomainError);
}

TEST(DensityMatrix, Validation) {
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(3));
  EXPECT_THROW(DensityMatrix(HermitianMatrix::identity(2)), DomainError);
  EXPECT_THROW(DensityMatrix(HermitianMatrix::diagonal({1.5, -0.5})), DomainError);
  Eigen::VectorXcd v(2);
  v << 1.0, Complex(0.0, 1.0);
  const DensityMatrix r = DensityMatrix::pure(v);
  EXPECT_NEAR(r.matrix().trace(), 1.0, 1e-15);
  EXPECT_TRUE(Near(r.matrix(), pauli::y_plus(), 1e-15));
}

TEST(MatrixConvexCombination, ClosedUnderCombination) {
  SeededRng rng(41);
  for (std::size_t d : {2, 3}) {
    for (int rep = 0; rep < 50; ++rep) {
      const Povm p = random_povm(3, d, PovmMethod::kGinibreRenormalized, rng);
      const Povm q = random_povm(3, d, PovmMethod::kGinibreRenormalized, rng);
      const Effect a = ginibre_effect(d, rng);
      const ComplexMatrix u = random_unitary(d, rng), v = random_unitary(d, rng);
      EXPECT_NO_THROW(matrix_convex_combination(p, q, a, u, v));
    }
  }
}

TEST(Povm, PermutedAndProbabilities) {
  const Povm p = pauli_povms().z;
  const Povm s = p.permuted(std::vector<std::size_t>{1, 0});
  EXPECT_TRUE(Near(s[0], pauli::z_minus(), 0.0));
  EXPECT_THROW(p.permuted(std::vector<std::size_t>{0, 0}), DomainError);
  const auto pr = p.probabilities(DensityMatrix(pauli::x_plus()));
  EXPECT_NEAR(pr[0], 0.5, 1e-15);
  EXPECT_NEAR(pr[1], 0.5, 1e-15);
}

}  // namespace
}  // namespace povmdyn

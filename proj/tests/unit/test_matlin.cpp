// SPDX-License-Identifier: Apache-2.0
//
// pilotforge: joint pilot and analog combiner design for multi-cell massive MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <vector>

#include "pilotforge/errors.hpp"
#include "pilotforge/matlin.hpp"
#include "test_util.hpp"

namespace pilotforge {
namespace {

using namespace matlin;
using testing::gaussian;
using testing::random_psd;

TEST(Kron, IdentityLeftGivesBlockDiagonal) {
    Rng rng = testing::seeded(1);
    const CMatrix a = gaussian(2, 2, rng);
    const std::vector<CMatrix> blocks{a, a};
    EXPECT_EQ(kron(CMatrix::Identity(2, 2), a), blkdiag(blocks));
}

TEST(Kron, ScalarOneIsNeutral) {
    Rng rng = testing::seeded(2);
    const CMatrix a = gaussian(3, 2, rng);
    EXPECT_EQ(kron(a, CMatrix::Ones(1, 1)), a);
}

TEST(Kron, Dimensions) {
    const CMatrix k = kron(CMatrix::Ones(2, 3), CMatrix::Ones(4, 5));
    EXPECT_EQ(k.rows(), 8);
    EXPECT_EQ(k.cols(), 15);
}

TEST(Kron, BlockStructure) {
    Rng rng = testing::seeded(3);
    const CMatrix a = gaussian(2, 3, rng);
    const CMatrix b = gaussian(3, 2, rng);
    const CMatrix k = kron(a, b);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_LT((k.block(i * 3, j * 2, 3, 2) - a(i, j) * b).norm(), 1e-14);
        }
    }
}

TEST(Kron, MixedProductAndBilinearity) {
    Rng rng = testing::seeded(4);
    const CMatrix a = gaussian(2, 3, rng), b = gaussian(3, 2, rng);
    const CMatrix c = gaussian(3, 2, rng), d = gaussian(2, 4, rng);
    EXPECT_LT(rel_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)), 1e-10);
    const CMatrix a2 = gaussian(2, 3, rng);
    const Complex alpha(0.3, -1.1);
    EXPECT_LT(rel_diff(kron(alpha * a + a2, b), alpha * kron(a, b) + kron(a2, b)), 1e-10);
}

TEST(Vec, StacksColumns) {
    CMatrix a(2, 2);
    a << 1, 3, 2, 4;
    CMatrix expected(4, 1);
    expected << 1, 2, 3, 4;
    EXPECT_EQ(vec(a), expected);
}

TEST(Vec, ColumnVectorUnchanged) {
    Rng rng = testing::seeded(5);
    const CMatrix v = gaussian(5, 1, rng);
    EXPECT_EQ(vec(v), v);
}

TEST(Vec, KroneckerIdentity) {
    Rng rng = testing::seeded(6);
    const CMatrix a = gaussian(3, 3, rng), x = gaussian(3, 3, rng), b = gaussian(3, 3, rng);
    EXPECT_LT(rel_diff(vec(a * x * b), kron(b.transpose(), a) * vec(x)), 1e-12);
}

TEST(Blkdiag, SingleBlock) {
    Rng rng = testing::seeded(7);
    const std::vector<CMatrix> blocks{gaussian(3, 3, rng)};
    EXPECT_EQ(blkdiag(blocks), blocks.front());
}

TEST(Blkdiag, Scalars) {
    const std::vector<CMatrix> blocks{CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, 2.0)};
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    expected(1, 1) = 2.0;
    EXPECT_EQ(blkdiag(blocks), expected);
}

TEST(Blkdiag, DimensionsAndZeroOffDiagonal) {
    Rng rng = testing::seeded(8);
    std::vector<CMatrix> blocks;
    for (int m = 0; m < 3; ++m) blocks.push_back(gaussian(4, 4, rng));
    const CMatrix b = blkdiag(blocks);
    ASSERT_EQ(b.rows(), 12);
    ASSERT_EQ(b.cols(), 12);
    EXPECT_EQ(b.block(0, 4, 4, 8).norm(), 0.0);
    EXPECT_EQ(b.block(4, 4, 4, 4), blocks[1]);
}

TEST(HermEig, DiagonalSortedDescending) {
    CMatrix a = CMatrix::Zero(3, 3);
    a.diagonal() << 1, 3, 2;
    const auto e = herm_eig(a);
    EXPECT_NEAR(e.values(0), 3.0, 1e-14);
    EXPECT_NEAR(e.values(1), 2.0, 1e-14);
    EXPECT_NEAR(e.values(2), 1.0, 1e-14);
}

TEST(HermEig, IdentityAllOnes) {
    const auto e = herm_eig(CMatrix::Identity(4, 4));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), 1.0, 1e-14);
}

TEST(HermEig, ReconstructionAndOrthonormality) {
    Rng rng = testing::seeded(9);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix x = gaussian(5, 5, rng);
        const CMatrix a = x + x.adjoint();
        const auto e = herm_eig(a);
        for (int i = 0; i + 1 < 5; ++i) EXPECT_GE(e.values(i), e.values(i + 1));
        EXPECT_LT((e.vectors.adjoint() * e.vectors - CMatrix::Identity(5, 5)).norm(), 1e-10);
        const CMatrix recon = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
        EXPECT_LT((recon - a).norm(), 1e-8 * a.norm());
        EXPECT_LT((a * e.vectors - e.vectors * e.values.cast<Complex>().asDiagonal()).norm(), 1e-8 * a.norm());
    }
}

TEST(HermEig, PsdInputHasNonNegativeSpectrum) {
    Rng rng = testing::seeded(10);
    const CMatrix x = gaussian(6, 3, rng);
    const CMatrix a = x * x.adjoint();  // rank 3
    const auto e = herm_eig(a);
    EXPECT_GE(e.values.minCoeff(), -1e-10 * a.norm());
}

TEST(HermEig, RejectsNonHermitian) {
    CMatrix a = CMatrix::Identity(2, 2);
    a(0, 1) = 1.0;
    try {
        herm_eig(a);
        FAIL() << "expected NotHermitian";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
    }
}

TEST(PsdSqrt, Diagonal) {
    CMatrix a = CMatrix::Zero(2, 2);
    a.diagonal() << 4, 9;
    CMatrix expected = CMatrix::Zero(2, 2);
    expected.diagonal() << 2, 3;
    EXPECT_LT((psd_sqrt(a) - expected).norm(), 1e-14);
}

TEST(PsdSqrt, Identity) { EXPECT_LT((psd_sqrt(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-14); }

TEST(PsdSqrt, RandomReconstruction) {
    Rng rng = testing::seeded(11);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = random_psd(5, rng);
        const CMatrix r = psd_sqrt(a);
        EXPECT_TRUE(is_hermitian(r));
        EXPECT_LT((r * r - a).norm(), 1e-8 * a.norm());
        EXPECT_GE(herm_eig(r).values.minCoeff(), -1e-12);
    }
}

TEST(PsdSqrt, ClampsTinyNegativeEigenvalues) {
    CMatrix a = CMatrix::Zero(2, 2);
    a.diagonal() << 1.0, -1e-13;
    const CMatrix r = psd_sqrt(a);
    EXPECT_NEAR(r(1, 1).real(), 0.0, 1e-15);
}

TEST(PsdSqrt, RejectsIndefinite) {
    CMatrix a = CMatrix::Zero(2, 2);
    a.diagonal() << 1.0, -0.5;
    try {
        psd_sqrt(a);
        FAIL() << "expected NotPSD";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPSD);
    }
}

TEST(PsdSqrt, CommutesWithUnitaryConjugation) {
    Rng rng = testing::seeded(12);
    const CMatrix a = random_psd(4, rng);
    const CMatrix u = testing::random_unitary(4, rng);
    EXPECT_LT(rel_diff(psd_sqrt(u * a * u.adjoint()), u * psd_sqrt(a) * u.adjoint()), 1e-9);
}

TEST(PsdInvSqrt, InvertsTheRoot) {
    Rng rng = testing::seeded(13);
    const CMatrix a = random_psd(4, rng, 0.1);
    EXPECT_LT((psd_inv_sqrt(a) * psd_sqrt(a) - CMatrix::Identity(4, 4)).norm(), 1e-9);
}

TEST(RangeProjector, FirstBasisVector) {
    CMatrix e1 = CMatrix::Zero(4, 1);
    e1(0) = 1.0;
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    EXPECT_LT((range_projector(e1) - expected).norm(), 1e-14);
}

TEST(RangeProjector, InvertibleGivesIdentity) {
    Rng rng = testing::seeded(14);
    EXPECT_LT((range_projector(gaussian(4, 4, rng)) - CMatrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(RangeProjector, FixesRangeAndIsOrthogonal) {
    Rng rng = testing::seeded(15);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = gaussian(4, 2, rng);
        const CMatrix p = range_projector(a);
        EXPECT_LT((p * a - a).norm(), 1e-8 * a.norm());
        EXPECT_LT((p * p - p).norm(), 1e-8);
        EXPECT_LT((p - p.adjoint()).norm(), 1e-8);
        EXPECT_NEAR(p.trace().real(), 2.0, 1e-10);
    }
}

TEST(RangeProjector, RankDeficientInput) {
    Rng rng = testing::seeded(16);
    const CMatrix b = gaussian(5, 2, rng);
    const CMatrix a = b * gaussian(2, 4, rng);  // 5x4 of rank 2
    EXPECT_NEAR(range_projector(a).trace().real(), 2.0, 1e-8);
    EXPECT_EQ(rank(a), 2);
}

TEST(RangeProjector, ZeroGivesZero) { EXPECT_EQ(range_projector(CMatrix::Zero(3, 2)).norm(), 0.0); }

TEST(SolveHpd, IdentityReturnsRhs) {
    Rng rng = testing::seeded(17);
    const CMatrix b = gaussian(3, 2, rng);
    EXPECT_LT((solve_hpd(CMatrix::Identity(3, 3), b) - b).norm(), 1e-14);
}

TEST(SolveHpd, Diagonal) {
    CMatrix a = CMatrix::Zero(2, 2);
    a.diagonal() << 2, 4;
    CMatrix b(2, 1);
    b << 2, 4;
    const CMatrix x = solve_hpd(a, b);
    EXPECT_NEAR(std::abs(x(0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(x(1) - 1.0), 0.0, 1e-14);
}

TEST(SolveHpd, RandomResidual) {
    Rng rng = testing::seeded(18);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = random_psd(6, rng, 0.01);
        const CMatrix b = gaussian(6, 3, rng);
        const CMatrix x = solve_hpd(a, b);
        EXPECT_LT((a * x - b).norm(), 1e-8 * b.norm());
    }
}

TEST(SolveHpd, SingularThrows) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    try {
        solve_hpd(a, CMatrix::Ones(2, 1));
        FAIL() << "expected Singular";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Singular);
    }
    CMatrix ill = CMatrix::Identity(2, 2);
    ill(1, 1) = 1e-16;
    EXPECT_THROW(solve_hpd(ill, CMatrix::Ones(2, 1)), Error);
}

TEST(Helpers, FiniteAndHermitianChecks) {
    CMatrix a = CMatrix::Identity(2, 2);
    EXPECT_TRUE(all_finite(a));
    EXPECT_TRUE(is_hermitian(a));
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(all_finite(a));
    CMatrix s(1, 3);
    s << Complex(3, 4), 0, 1;
    EXPECT_NEAR(column_power(s)(0), 25.0, 1e-14);
}

}  // namespace
}  // namespace pilotforge

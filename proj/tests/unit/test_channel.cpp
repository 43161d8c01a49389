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

#include <cmath>
#include <numbers>

#include "pilotforge/channel.hpp"
#include "pilotforge/errors.hpp"
#include "test_util.hpp"

namespace pilotforge {
namespace {

using namespace channel;
using matlin::CMatrix;
using matlin::Complex;
using testing::config;

// Sample covariance of vec(H_ij) over n draws.
CMatrix sample_covariance(const CorrelationProfile& profile, int i, int j, int n, Rng& rng) {
    const ChannelSampler sampler(profile);
    const Eigen::Index d = static_cast<Eigen::Index>(profile.users()) * profile.antennas();
    CMatrix acc = CMatrix::Zero(d, d);
    for (int t = 0; t < n; ++t) {
        const CMatrix h = sampler.sample(rng).vec(i, j);
        acc.noalias() += h * h.adjoint();
    }
    return acc / static_cast<double>(n);
}

TEST(NetworkConfig, Bounds) {
    EXPECT_NO_THROW(config(3, 4, 10, 1, 4).validate());
    EXPECT_THROW(config(3, 4, 10, 11, 4).validate(), Error);
    EXPECT_THROW(config(3, 4, 10, 0, 4).validate(), Error);
    EXPECT_THROW(config(3, 4, 10, 1, 13).validate(), Error);
    EXPECT_THROW(config(3, 4, 10, 1, 0).validate(), Error);
    EXPECT_THROW(config(3, 4, 10, 1, 4, 0.0).validate(), Error);
}

TEST(NetworkConfig, FullLengthPilotsWarn) {
    EXPECT_TRUE(config(3, 4, 10, 1, 11).warnings().empty());
    EXPECT_FALSE(config(3, 4, 10, 1, 12).warnings().empty());
}

TEST(RandomFullySeparable, PsdQAndUniformDiagonalP) {
    Rng rng = testing::seeded(100);
    const auto cfg = config(3, 4, 10, 1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto prof = make_random_fully_separable(cfg, rng);
        ASSERT_EQ(prof.kind(), ProfileKind::FullySeparable);
        for (int i = 0; i < 3; ++i) {
            EXPECT_GE(matlin::herm_eig(prof.q(i, i)).values.minCoeff(), 0.0);
            const CMatrix p = prof.p(0, i);
            CMatrix off = p;
            off.diagonal().setZero();
            EXPECT_EQ(off.norm(), 0.0);
            for (int k = 0; k < 4; ++k) {
                EXPECT_GE(p(k, k).real(), 0.0);
                EXPECT_LE(p(k, k).real(), 1.0);
            }
        }
    }
}

TEST(RandomFullySeparable, Deterministic) {
    const auto cfg = config(2, 3, 4, 1, 2);
    Rng a = testing::seeded(101);
    Rng b = testing::seeded(101);
    const auto pa = make_random_fully_separable(cfg, a);
    const auto pb = make_random_fully_separable(cfg, b);
    for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(pa.q(i, i), pb.q(i, i));
        EXPECT_EQ(pa.p(i, i), pb.p(i, i));
    }
}

TEST(IdentityRx, QIsIdentity) {
    Rng rng = testing::seeded(102);
    const auto prof = make_identity_rx_fully_separable(config(3, 4, 10, 1, 4), rng);
    EXPECT_EQ(prof.q(1, 2), CMatrix::Identity(10, 10));
    EXPECT_TRUE(prof.transmit_diagonal());
}

TEST(Profile, RejectsNonPsdAndBadBeta) {
    FullySeparable fs;
    fs.q = {CMatrix::Identity(2, 2)};
    fs.p = {-CMatrix::Identity(2, 2)};
    EXPECT_THROW(CorrelationProfile{fs}, Error);
    MuMimo mu;
    mu.cells = 1;
    mu.users = 1;
    mu.antennas = 2;
    mu.beta = {0.0};
    EXPECT_THROW(CorrelationProfile{mu}, Error);
}

TEST(HexGeometry, SevenCellLayout) {
    Rng rng = testing::seeded(103);
    const auto geom = make_hex_geometry(config(7, 4, 10, 10, 4), 1.0, rng);
    ASSERT_EQ(geom.cells(), 7);
    EXPECT_NEAR(geom.cell_centers[0].x, 0.0, 1e-12);
    EXPECT_NEAR(geom.cell_centers[0].y, 0.0, 1e-12);
    for (int j = 1; j < 7; ++j) {
        const auto& c = geom.cell_centers[static_cast<std::size_t>(j)];
        EXPECT_NEAR(std::hypot(c.x, c.y), std::numbers::sqrt3, 1e-12);
    }
    // the six ring cells are 60 degrees apart
    for (int a = 1; a < 7; ++a) {
        int neighbours = 0;
        for (int b = 1; b < 7; ++b) {
            const auto& p = geom.cell_centers[static_cast<std::size_t>(a)];
            const auto& q = geom.cell_centers[static_cast<std::size_t>(b)];
            if (std::abs(std::hypot(p.x - q.x, p.y - q.y) - std::numbers::sqrt3) < 1e-9) ++neighbours;
        }
        EXPECT_EQ(neighbours, 2);
    }
}

TEST(HexGeometry, UsersInsideTheirCells) {
    Rng rng = testing::seeded(104);
    for (int trial = 0; trial < 20; ++trial) {
        const auto geom = make_hex_geometry(config(7, 4, 10, 10, 4), 2.5, rng);
        for (int j = 0; j < 7; ++j) {
            for (int k = 0; k < 4; ++k) {
                const auto& ut = geom.ut_positions[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                const auto& c = geom.cell_centers[static_cast<std::size_t>(j)];
                EXPECT_TRUE(geom.inside_cell(ut, j));
                EXPECT_LE(std::hypot(ut.x - c.x, ut.y - c.y), 2.5 + 1e-12);
                EXPECT_GE(geom.distance(j, k, j), kMinDistanceFraction * 2.5);
            }
        }
    }
}

TEST(HexGeometry, OtherCellCounts) {
    Rng rng = testing::seeded(105);
    const auto geom = make_hex_geometry(config(3, 2, 4, 4, 2), 1.0, rng);
    EXPECT_EQ(geom.cells(), 3);
}

TEST(HexGeometry, DistanceFloor) {
    Geometry g;
    g.cell_radius = 2.0;
    g.cell_centers = {{0.0, 0.0}};
    g.ut_positions = {{{0.0, 0.0}, {0.6, 0.8}}};
    EXPECT_DOUBLE_EQ(g.distance(0, 0, 0), 0.1);
    EXPECT_DOUBLE_EQ(g.distance(0, 1, 0), 1.0);
}

TEST(HexGeometry, DistancesFollowRelabeling) {
    Geometry g;
    g.cell_centers = {{0.0, 0.0}, {std::numbers::sqrt3, 0.0}};
    g.ut_positions = {{{0.3, 0.1}}, {{1.5, -0.2}}};
    Geometry swapped;
    swapped.cell_centers = {g.cell_centers[1], g.cell_centers[0]};
    swapped.ut_positions = {g.ut_positions[1], g.ut_positions[0]};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(g.distance(i, 0, j), swapped.distance(1 - i, 0, 1 - j));
    }
}

TEST(MuMimoProfile, PathLossArithmetic) {
    Geometry g;
    g.cell_centers = {{0.0, 0.0}};
    g.ut_positions = {{{1.0, 0.0}, {0.0, 2.0}}};
    Rng rng = testing::seeded(106);
    const auto prof = make_mu_mimo_profile(g, 2, 3, 3.0, 0.0, rng);
    EXPECT_DOUBLE_EQ(prof.transmit_gain(0, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(prof.transmit_gain(0, 1, 0), 0.125);
}

TEST(MuMimoProfile, ShadowingSpread) {
    Geometry g;
    g.cell_centers = {{0.0, 0.0}};
    g.ut_positions.resize(1);
    const int users = 1000;
    g.ut_positions[0].assign(users, Point{1.0, 0.0});
    Rng rng = testing::seeded(107);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int calls = 100;
    for (int c = 0; c < calls; ++c) {
        const auto prof = make_mu_mimo_profile(g, users, 1, 3.0, 8.0, rng);
        for (int k = 0; k < users; ++k) {
            const double db = 10.0 * std::log10(prof.transmit_gain(0, k, 0));
            sum += db;
            sum_sq += db * db;
        }
    }
    const double n = static_cast<double>(calls) * users;
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    EXPECT_NEAR(sd, 8.0, 0.02 * 8.0);
    EXPECT_NEAR(mean, 0.0, 0.1);
}

TEST(SampleChannels, WhiteEntriesHaveUnitVariance) {
    FullySeparable fs;
    fs.q = {CMatrix::Identity(3, 3)};
    fs.p = {CMatrix::Identity(2, 2)};
    const CorrelationProfile prof(fs);
    Rng rng = testing::seeded(108);
    const CMatrix cov = sample_covariance(prof, 0, 0, 100000, rng);
    EXPECT_LT((cov - CMatrix::Identity(6, 6)).norm() / std::sqrt(6.0), 0.02);
}

TEST(SampleChannels, CovarianceIsKroneckerProduct) {
    Rng rng = testing::seeded(109);
    const auto cfg = config(2, 2, 3, 3, 2);
    const auto prof = testing::random_partial(cfg, rng);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const CMatrix expected = matlin::kron(prof.p(i, j), prof.q(i, j));
            const CMatrix cov = sample_covariance(prof, i, j, 100000, rng);
            EXPECT_LT((cov - expected).norm() / expected.norm(), 0.05) << "pair " << i << "," << j;
        }
    }
}

TEST(SampleChannels, MuMimoColumnsAreScaledWhite) {
    MuMimo mu;
    mu.cells = 2;
    mu.users = 2;
    mu.antennas = 2;
    mu.beta = {1.0, 0.2, 0.5, 0.1, 0.3, 2.0, 0.05, 1.5};
    const CorrelationProfile prof(mu);
    Rng rng = testing::seeded(110);
    const CMatrix cov = sample_covariance(prof, 0, 1, 100000, rng);
    // column k of H_01 has covariance beta_0k1 I
    CMatrix expected = CMatrix::Zero(4, 4);
    expected.diagonal() << mu(0, 0, 1), mu(0, 0, 1), mu(0, 1, 1), mu(0, 1, 1);
    EXPECT_LT((cov - expected).norm() / expected.norm(), 0.05);
}

TEST(SampleChannels, MuMimoAgreesWithPartiallySeparableView) {
    MuMimo mu;
    mu.cells = 2;
    mu.users = 2;
    mu.antennas = 2;
    mu.beta = {1.0, 0.2, 0.5, 0.1, 0.3, 2.0, 0.05, 1.5};
    const CorrelationProfile a(mu);
    const CorrelationProfile b(a.as_partially_separable());
    Rng ra = testing::seeded(111);
    Rng rb = testing::seeded(112);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const CMatrix ca = sample_covariance(a, i, j, 100000, ra);
            const CMatrix cb = sample_covariance(b, i, j, 100000, rb);
            EXPECT_LT((ca - cb).norm() / cb.norm(), 0.05);
        }
    }
}

TEST(SampleChannels, DeterministicForSeed) {
    Rng rng = testing::seeded(113);
    const auto cfg = config(2, 2, 3, 3, 2);
    const auto prof = testing::random_partial(cfg, rng);
    Rng a = testing::seeded(114);
    Rng b = testing::seeded(114);
    const auto ra = sample_channels(prof, cfg, a);
    const auto rb = sample_channels(prof, cfg, b);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_EQ(ra.at(i, j), rb.at(i, j));
    }
}

TEST(EffectiveP, SingleCell) {
    Rng rng = testing::seeded(115);
    const auto prof = testing::random_full(config(1, 3, 2, 1, 2), rng);
    const auto eff = effective_p_matrices(prof);
    ASSERT_EQ(eff.p_bar.size(), 1u);
    EXPECT_EQ(eff.p_bar[0], prof.p(0, 0));
}

TEST(EffectiveP, FullySeparableSharesOneAssembly) {
    Rng rng = testing::seeded(116);
    const auto prof = testing::random_full(config(3, 2, 2, 1, 2), rng);
    const auto eff = effective_p_matrices(prof);
    EXPECT_TRUE(eff.shared);
    const std::vector<CMatrix> blocks{prof.p(0, 0), prof.p(0, 1), prof.p(0, 2)};
    const auto viewed = effective_p_matrices(CorrelationProfile(prof.as_partially_separable()));
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(eff.p_bar[static_cast<std::size_t>(i)], matlin::blkdiag(blocks));
        EXPECT_EQ(viewed.p_bar[static_cast<std::size_t>(i)], eff.p_bar[0]);
    }
}

TEST(EffectiveP, MuMimoHandExample) {
    MuMimo mu;
    mu.cells = 2;
    mu.users = 1;
    mu.antennas = 1;
    mu.beta.assign(4, 0.0);
    mu(0, 0, 0) = 1.0;
    mu(0, 0, 1) = 0.5;
    mu(1, 0, 0) = 0.25;
    mu(1, 0, 1) = 2.0;
    const auto eff = effective_p_matrices(CorrelationProfile(mu));
    EXPECT_FALSE(eff.shared);
    CMatrix p1 = CMatrix::Zero(2, 2);
    p1.diagonal() << 1.0, 0.5;
    CMatrix p2 = CMatrix::Zero(2, 2);
    p2.diagonal() << 0.25, 2.0;
    EXPECT_EQ(eff.p_bar[0], p1);
    EXPECT_EQ(eff.p_bar[1], p2);
    EXPECT_EQ(eff.q[0], CMatrix::Identity(1, 1));
}

}  // namespace
}  // namespace pilotforge

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

#include "pilotforge/channel.hpp"

#include <cmath>
#include <numbers>

namespace pilotforge::channel {

using matlin::CMatrix;

namespace {

void check_psd(const CMatrix& a, const std::string& what) {
    if (!matlin::is_hermitian(a)) {
        throw Error(ErrorCode::NotHermitian, what + " is not Hermitian");
    }
    const auto eig = matlin::herm_eig(a);
    if (eig.values.size() > 0 && eig.values(eig.values.size() - 1) < -matlin::kPsdTol * a.norm()) {
        throw Error(ErrorCode::NotPSD, what + " is not PSD");
    }
}

void check_dims(const CMatrix& a, Eigen::Index n, const std::string& what) {
    if (a.rows() != n || a.cols() != n) {
        throw Error(ErrorCode::DimMismatch, what + " must be " + std::to_string(n) + "x" +
                                                std::to_string(n));
    }
}

bool is_identity(const CMatrix& a) {
    return a.rows() == a.cols() && (a - CMatrix::Identity(a.rows(), a.cols())).norm() == 0.0;
}

bool is_diagonal(const CMatrix& a) {
    CMatrix off = a;
    off.diagonal().setZero();
    return off.norm() == 0.0;
}

CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    CMatrix x(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            x(i, j) = complex_normal(rng);
        }
    }
    return x;
}

CMatrix uniform_diagonal(int n, Rng& rng) {
    CMatrix p = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        p(k, k) = uniform01(rng);
    }
    return p;
}

// Q = X X^* is full rank with probability one; guard the rare near-singular draw.
CMatrix full_rank_gram(const CMatrix& x) {
    CMatrix q = x * x.adjoint();
    q = 0.5 * (q + q.adjoint());
    const auto eig = matlin::herm_eig(q);
    const double top = eig.values(0);
    const double bottom = eig.values(eig.values.size() - 1);
    if (bottom * 1e12 < top) {
        q += 1e-12 * top * CMatrix::Identity(q.rows(), q.cols());
    }
    return q;
}

// Axial hex coordinates in spiral order: center, then rings of 6, 12, ...
std::vector<std::pair<int, int>> hex_spiral(int count) {
    static constexpr int kDirs[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};
    std::vector<std::pair<int, int>> out;
    out.emplace_back(0, 0);
    for (int ring = 1; static_cast<int>(out.size()) < count; ++ring) {
        int q = kDirs[4][0] * ring;
        int r = kDirs[4][1] * ring;
        for (int side = 0; side < 6; ++side) {
            for (int step = 0; step < ring; ++step) {
                out.emplace_back(q, r);
                q += kDirs[side][0];
                r += kDirs[side][1];
            }
        }
    }
    out.resize(static_cast<std::size_t>(count));
    return out;
}

}  // namespace

void NetworkConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    if (cells < 1) fail("cells must be >= 1");
    if (users < 1) fail("users must be >= 1");
    if (antennas < 1) fail("antennas must be >= 1");
    if (rf_chains < 1 || rf_chains > antennas) fail("rf_chains must satisfy 1 <= N_RF <= N_BS");
    if (tau < 1 || tau > total_users()) fail("tau must satisfy 1 <= tau <= M*K");
    if (!(power > 0.0) || !std::isfinite(power)) fail("power must be positive");
}

std::vector<std::string> NetworkConfig::warnings() const {
    std::vector<std::string> out;
    if (tau == total_users()) {
        out.emplace_back("tau == M*K: pilots can be fully orthogonal, interference vanishes");
    }
    return out;
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::FullySeparable: return "fully-separable";
        case ProfileKind::PartiallySeparable: return "partially-separable";
        case ProfileKind::MuMimo: return "mu-mimo";
    }
    return "unknown";
}

CorrelationProfile::CorrelationProfile(Variant v) : data_(std::move(v)) {
    if (const auto* fs = std::get_if<FullySeparable>(&data_)) {
        if (fs->q.empty() || fs->q.size() != fs->p.size()) {
            throw Error(ErrorCode::DimMismatch, "fully-separable profile needs M receive and M transmit factors");
        }
        cells_ = static_cast<int>(fs->q.size());
        antennas_ = static_cast<int>(fs->q[0].rows());
        users_ = static_cast<int>(fs->p[0].rows());
        for (int i = 0; i < cells_; ++i) {
            check_dims(fs->q[i], antennas_, "Q_" + std::to_string(i));
            check_dims(fs->p[i], users_, "P_" + std::to_string(i));
            check_psd(fs->q[i], "Q_" + std::to_string(i));
            check_psd(fs->p[i], "P_" + std::to_string(i));
        }
    } else if (const auto* ps = std::get_if<PartiallySeparable>(&data_)) {
        if (ps->q.empty() || ps->p.size() != ps->q.size() * ps->q.size()) {
            throw Error(ErrorCode::DimMismatch, "partially-separable profile needs M receive and MxM transmit factors");
        }
        cells_ = static_cast<int>(ps->q.size());
        antennas_ = static_cast<int>(ps->q[0].rows());
        users_ = static_cast<int>(ps->p[0].rows());
        for (int i = 0; i < cells_; ++i) {
            check_dims(ps->q[i], antennas_, "Q_" + std::to_string(i));
            check_psd(ps->q[i], "Q_" + std::to_string(i));
            for (int j = 0; j < cells_; ++j) {
                const auto name = "P_" + std::to_string(i) + std::to_string(j);
                check_dims(ps->p[static_cast<std::size_t>(i * cells_ + j)], users_, name);
                check_psd(ps->p[static_cast<std::size_t>(i * cells_ + j)], name);
            }
        }
    } else {
        const auto& mu = std::get<MuMimo>(data_);
        if (mu.cells < 1 || mu.users < 1 || mu.antennas < 1 ||
            mu.beta.size() != static_cast<std::size_t>(mu.cells * mu.users * mu.cells)) {
            throw Error(ErrorCode::DimMismatch, "mu-mimo profile needs M*K*M decay factors");
        }
        for (double b : mu.beta) {
            if (!(b > 0.0) || !std::isfinite(b)) {
                throw Error(ErrorCode::NotPSD, "decay factors must be positive and finite");
            }
        }
        cells_ = mu.cells;
        users_ = mu.users;
        antennas_ = mu.antennas;
    }
}

ProfileKind CorrelationProfile::kind() const {
    switch (data_.index()) {
        case 0: return ProfileKind::FullySeparable;
        case 1: return ProfileKind::PartiallySeparable;
        default: return ProfileKind::MuMimo;
    }
}

CMatrix CorrelationProfile::q(int i, int /*j*/) const {
    if (const auto* fs = std::get_if<FullySeparable>(&data_)) return fs->q[static_cast<std::size_t>(i)];
    if (const auto* ps = std::get_if<PartiallySeparable>(&data_)) return ps->q[static_cast<std::size_t>(i)];
    return CMatrix::Identity(antennas_, antennas_);
}

CMatrix CorrelationProfile::p(int i, int j) const {
    if (const auto* fs = std::get_if<FullySeparable>(&data_)) return fs->p[static_cast<std::size_t>(j)];
    if (const auto* ps = std::get_if<PartiallySeparable>(&data_)) {
        return ps->p[static_cast<std::size_t>(i * cells_ + j)];
    }
    const auto& mu = std::get<MuMimo>(data_);
    CMatrix d = CMatrix::Zero(users_, users_);
    for (int k = 0; k < users_; ++k) {
        d(k, k) = mu(i, k, j);
    }
    return d;
}

bool CorrelationProfile::transmit_diagonal() const {
    if (kind() == ProfileKind::MuMimo) return true;
    for (int i = 0; i < cells_; ++i) {
        for (int j = 0; j < cells_; ++j) {
            if (!is_diagonal(p(i, j))) return false;
        }
    }
    return true;
}

double CorrelationProfile::transmit_gain(int i, int k, int j) const {
    if (const auto* mu = std::get_if<MuMimo>(&data_)) return (*mu)(i, k, j);
    return p(i, j)(k, k).real();
}

PartiallySeparable CorrelationProfile::as_partially_separable() const {
    PartiallySeparable out;
    for (int i = 0; i < cells_; ++i) {
        out.q.push_back(q(i, i));
        for (int j = 0; j < cells_; ++j) {
            out.p.push_back(p(i, j));
        }
    }
    return out;
}

bool CorrelationProfile::matches(const NetworkConfig& cfg) const {
    return cfg.cells == cells_ && cfg.users == users_ && cfg.antennas == antennas_;
}

double Geometry::distance(int i, int k, int j) const {
    const Point& bs = cell_centers[static_cast<std::size_t>(i)];
    const Point& ut = ut_positions[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    const double d = std::hypot(ut.x - bs.x, ut.y - bs.y);
    return std::max(d, kMinDistanceFraction * cell_radius);
}

bool Geometry::inside_cell(const Point& pt, int j) const {
    const Point& c = cell_centers[static_cast<std::size_t>(j)];
    const double dx = std::abs(pt.x - c.x);
    const double dy = std::abs(pt.y - c.y);
    const double half_width = 0.5 * std::numbers::sqrt3 * cell_radius;
    const double slack = 1e-12 * cell_radius;
    return dx <= half_width + slack && dx / std::numbers::sqrt3 + dy <= cell_radius + slack;
}

CorrelationProfile make_random_fully_separable(const NetworkConfig& cfg, Rng& rng) {
    FullySeparable fs;
    for (int i = 0; i < cfg.cells; ++i) {
        fs.q.push_back(full_rank_gram(random_gaussian(cfg.antennas, cfg.antennas, rng)));
    }
    for (int j = 0; j < cfg.cells; ++j) {
        fs.p.push_back(uniform_diagonal(cfg.users, rng));
    }
    return CorrelationProfile(std::move(fs));
}

CorrelationProfile make_identity_rx_fully_separable(const NetworkConfig& cfg, Rng& rng) {
    FullySeparable fs;
    for (int i = 0; i < cfg.cells; ++i) {
        fs.q.push_back(CMatrix::Identity(cfg.antennas, cfg.antennas));
    }
    for (int j = 0; j < cfg.cells; ++j) {
        fs.p.push_back(uniform_diagonal(cfg.users, rng));
    }
    return CorrelationProfile(std::move(fs));
}

Geometry make_hex_geometry(const NetworkConfig& cfg, double cell_radius, Rng& rng) {
    if (!(cell_radius > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "cell radius must be positive");
    }
    Geometry geom;
    geom.cell_radius = cell_radius;
    for (const auto& [q, r] : hex_spiral(cfg.cells)) {
        geom.cell_centers.push_back({cell_radius * std::numbers::sqrt3 * (q + 0.5 * r),
                                     cell_radius * 1.5 * r});
    }
    const double half_width = 0.5 * std::numbers::sqrt3 * cell_radius;
    std::uniform_real_distribution<double> ux(-half_width, half_width);
    std::uniform_real_distribution<double> uy(-cell_radius, cell_radius);
    const double floor = kMinDistanceFraction * cell_radius;
    geom.ut_positions.resize(static_cast<std::size_t>(cfg.cells));
    for (int j = 0; j < cfg.cells; ++j) {
        const Point& c = geom.cell_centers[static_cast<std::size_t>(j)];
        auto& uts = geom.ut_positions[static_cast<std::size_t>(j)];
        while (static_cast<int>(uts.size()) < cfg.users) {
            const double dx = ux(rng);
            const double dy = uy(rng);
            const Point pt{c.x + dx, c.y + dy};
            if (geom.inside_cell(pt, j) && std::hypot(dx, dy) >= floor) {
                uts.push_back(pt);
            }
        }
    }
    return geom;
}

CorrelationProfile make_mu_mimo_profile(const Geometry& geom, int users, int antennas, double gamma,
                                        double sigma_shad_db, Rng& rng) {
    if (!(gamma > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "decay exponent must be positive");
    }
    if (!(sigma_shad_db >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "shadowing deviation must be non-negative");
    }
    MuMimo mu;
    mu.cells = geom.cells();
    mu.users = users;
    mu.antennas = antennas;
    mu.beta.resize(static_cast<std::size_t>(mu.cells * users * mu.cells));
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < mu.cells; ++i) {
        for (int k = 0; k < users; ++k) {
            for (int j = 0; j < mu.cells; ++j) {
                const double z = std::pow(10.0, sigma_shad_db * unit(rng) / 10.0);
                mu(i, k, j) = z / std::pow(geom.distance(i, k, j), gamma);
            }
        }
    }
    return CorrelationProfile(std::move(mu));
}

ChannelSampler::ChannelSampler(const CorrelationProfile& profile)
    : cells_(profile.cells()), users_(profile.users()), antennas_(profile.antennas()) {
    const auto n = static_cast<std::size_t>(cells_ * cells_);
    q_root_.resize(n);
    p_root_.resize(n);
    for (int i = 0; i < cells_; ++i) {
        for (int j = 0; j < cells_; ++j) {
            const auto idx = static_cast<std::size_t>(i * cells_ + j);
            const CMatrix q = profile.q(i, j);
            if (!is_identity(q)) {
                q_root_[idx] = matlin::psd_sqrt(q);
            }
            p_root_[idx] = matlin::psd_sqrt(profile.p(i, j)).transpose();
        }
    }
}

ChannelRealization ChannelSampler::sample(Rng& rng) const {
    ChannelRealization out;
    out.cells = cells_;
    out.h.reserve(static_cast<std::size_t>(cells_ * cells_));
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(cells_ * cells_); ++idx) {
        CMatrix hbar = random_gaussian(antennas_, users_, rng);
        if (q_root_[idx].size() > 0) {
            hbar = q_root_[idx] * hbar;
        }
        out.h.push_back(hbar * p_root_[idx]);
    }
    return out;
}

ChannelRealization sample_channels(const CorrelationProfile& profile, const NetworkConfig& cfg,
                                   Rng& rng) {
    if (!profile.matches(cfg)) {
        throw Error(ErrorCode::DimMismatch, "profile dimensions do not match the network config");
    }
    return ChannelSampler(profile).sample(rng);
}

EffectiveCorrelations effective_p_matrices(const CorrelationProfile& profile) {
    EffectiveCorrelations out;
    const int m = profile.cells();
    out.shared = profile.kind() == ProfileKind::FullySeparable;
    for (int i = 0; i < m; ++i) {
        std::vector<CMatrix> blocks;
        blocks.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            blocks.push_back(profile.p(i, j));
        }
        out.p_bar.push_back(matlin::blkdiag(blocks));
        out.q.push_back(profile.q(i, i));
    }
    return out;
}

}  // namespace pilotforge::channel

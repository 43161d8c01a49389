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

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pilotforge/matlin.hpp"
#include "pilotforge/rng.hpp"

namespace pilotforge::channel {

using matlin::CMatrix;

/// Network dimensions and the per-user pilot power budget.
struct NetworkConfig {
    int cells = 1;      // M
    int users = 1;      // K, users per cell
    int antennas = 1;   // N_BS
    int rf_chains = 1;  // N_RF
    int tau = 1;        // pilot length
    double power = 1.0; // per-user budget

    int total_users() const { return cells * users; }

    /// Throws InvalidConfig when a bound is violated. tau == M*K is accepted
    /// (see warnings()), tau > M*K is not.
    void validate() const;

    /// Non-fatal remarks, e.g. tau == M*K where interference can be removed entirely.
    std::vector<std::string> warnings() const;
};

/// Q_ij = Q_i and P_ij = P_j.
struct FullySeparable {
    std::vector<CMatrix> q;  // M receive correlations, N_BS x N_BS
    std::vector<CMatrix> p;  // M transmit correlations, K x K
};

/// Q_ij = Q_i; P_ij varies with both link ends. p is stored row-major, p[i*M + j].
struct PartiallySeparable {
    std::vector<CMatrix> q;
    std::vector<CMatrix> p;
};

/// Q_i = I and P_ij = diag(beta_i1j, ..., beta_iKj).
struct MuMimo {
    int cells = 0;
    int users = 0;
    int antennas = 0;
    std::vector<double> beta;  // beta[(i*K + k)*M + j]

    double operator()(int i, int k, int j) const {
        return beta[static_cast<std::size_t>((i * users + k) * cells + j)];
    }
    double& operator()(int i, int k, int j) {
        return beta[static_cast<std::size_t>((i * users + k) * cells + j)];
    }
};

enum class ProfileKind { FullySeparable, PartiallySeparable, MuMimo };

std::string to_string(ProfileKind kind);

/// One of the three structured correlation models, validated on construction
/// (Hermitian PSD factors, positive decay factors, consistent dimensions).
class CorrelationProfile {
public:
    using Variant = std::variant<FullySeparable, PartiallySeparable, MuMimo>;

    explicit CorrelationProfile(Variant v);

    ProfileKind kind() const;
    const Variant& variant() const { return data_; }

    int cells() const { return cells_; }
    int users() const { return users_; }
    int antennas() const { return antennas_; }

    /// Receive-side correlation Q_ij.
    CMatrix q(int i, int j) const;
    /// Transmit-side correlation P_ij.
    CMatrix p(int i, int j) const;

    /// True when every P_ij is diagonal (always for MuMimo).
    bool transmit_diagonal() const;
    /// p_{ij}(k,k): the large-scale gain of user k of cell j towards BS i.
    double transmit_gain(int i, int k, int j) const;

    /// Lossless view of any variant as a partially-separable profile.
    PartiallySeparable as_partially_separable() const;

    /// True when the dimensions agree with cfg.
    bool matches(const NetworkConfig& cfg) const;

private:
    Variant data_;
    int cells_ = 0;
    int users_ = 0;
    int antennas_ = 0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Planar layout of hexagonal cells with a BS at each center.
struct Geometry {
    std::vector<Point> cell_centers;
    std::vector<std::vector<Point>> ut_positions;  // [cell][user]
    double cell_radius = 1.0;

    int cells() const { return static_cast<int>(cell_centers.size()); }

    /// r_ikj: distance between user k of cell j and BS i, floored at
    /// kMinDistanceFraction * cell_radius.
    double distance(int i, int k, int j) const;

    /// Point-in-hexagon test for cell j (pointy-top, circumradius cell_radius).
    bool inside_cell(const Point& pt, int j) const;
};

inline constexpr double kMinDistanceFraction = 0.05;

/// H_ij for every (i, j), stored row-major h[i*M + j], each N_BS x K.
struct ChannelRealization {
    int cells = 0;
    std::vector<CMatrix> h;

    const CMatrix& at(int i, int j) const { return h[static_cast<std::size_t>(i * cells + j)]; }
    CMatrix& at(int i, int j) { return h[static_cast<std::size_t>(i * cells + j)]; }
    /// h_ij = vec(H_ij)
    CMatrix vec(int i, int j) const { return matlin::vec(at(i, j)); }
};

/// P-bar assemblies used by the pilot designers, plus the receive factors.
struct EffectiveCorrelations {
    bool shared = false;          // fully separable: every p_bar[i] is the same matrix
    std::vector<CMatrix> p_bar;   // M entries, each MK x MK
    std::vector<CMatrix> q;       // M receive correlations
};

/// Q_i = X_i X_i^* with X_i i.i.d. CN(0,1), P_j diagonal with Uniform[0,1] entries.
CorrelationProfile make_random_fully_separable(const NetworkConfig& cfg, Rng& rng);

/// Q_i = I, P_j diagonal with Uniform[0,1] entries: the decay-factor model
/// with cell-independent gains.
CorrelationProfile make_identity_rx_fully_separable(const NetworkConfig& cfg, Rng& rng);

/// Hexagonal cells in center-out spiral order (one center plus rings of six),
/// users uniform inside their cell.
Geometry make_hex_geometry(const NetworkConfig& cfg, double cell_radius, Rng& rng);

/// beta_ikj = z_ikj / r_ikj^gamma, 10 log10 z ~ N(0, sigma_shad_db^2).
CorrelationProfile make_mu_mimo_profile(const Geometry& geom, int users, int antennas, double gamma,
                                        double sigma_shad_db, Rng& rng);

/// Draws H_ij = Q_ij^{1/2} Hbar_ij P_ij^{T/2}; the transpose on the right
/// factor makes cov(vec H_ij) = P_ij (x) Q_ij for complex Hermitian P_ij too.
class ChannelSampler {
public:
    explicit ChannelSampler(const CorrelationProfile& profile);

    ChannelRealization sample(Rng& rng) const;

private:
    int cells_;
    int users_;
    int antennas_;
    std::vector<CMatrix> q_root_;  // per (i, j), empty when identity
    std::vector<CMatrix> p_root_;  // per (i, j), transposed square root
};

ChannelRealization sample_channels(const CorrelationProfile& profile, const NetworkConfig& cfg,
                                   Rng& rng);

EffectiveCorrelations effective_p_matrices(const CorrelationProfile& profile);

}  // namespace pilotforge::channel

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
#include <vector>

#include "pilotforge/channel.hpp"
#include "pilotforge/estimator.hpp"
#include "pilotforge/matlin.hpp"
#include "pilotforge/rng.hpp"

namespace pilotforge::pilots {

using estimator::PilotSet;
using matlin::CMatrix;

/// Everything the pilot objectives need once the combiners are fixed.
struct PilotObjectiveContext {
    int cells = 0;
    int users = 0;
    std::vector<double> weights;  // w_i from the combiner design
    std::vector<CMatrix> p_bar;   // P-bar_i = blkdiag(P_i1, ..., P_iM), MK x MK
    bool shared = false;          // all P-bar_i identical (fully separable)

    int total_users() const { return cells * users; }
    /// diag(w_1, ..., w_M) (x) I_K
    CMatrix weight_matrix() const;
    /// L_i = Z_i (x) I_K, the selector of cell i's users.
    CMatrix selector(int i) const;
    /// W-bar P-bar for the shared transmit assembly.
    CMatrix weighted_transmit() const;
};

PilotObjectiveContext make_context(const channel::CorrelationProfile& profile,
                                   std::vector<double> weights);

/// tr((S P S^*)^{-1} S P W P S^*). Requires a shared assembly.
double fully_sep_objective(const CMatrix& s, const PilotObjectiveContext& ctx);

/// sum_i w_i tr(S P_i^2 L_i S^* [S P_i S^*]^{-1})
double partially_sep_objective(const CMatrix& s, const PilotObjectiveContext& ctx);

/// S = sqrt(power) U_1^* with U_1 the eigenvectors of W-bar P-bar for the
/// tau largest eigenvalues. W-bar P-bar is block diagonal, so the eigenpairs
/// are taken block by block (eigenvalue ties resolved by cell, then by block
/// order) and zero-padded; this keeps U_1 an eigenbasis of P-bar as well.
PilotSet eigen_pilots(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg);

/// Diagonal P-bar only: the tau users with the largest d_ik = w_i p_i,kk get
/// orthogonal unit pilots scaled by sqrt(power); ties go to the lower
/// (cell, user) index. Everyone else is silent.
PilotSet user_selection(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg);

/// ((S~ S~^*)^{-1}) for S~ = [S; s] given q_prev = (S S^*)^{-1}.
/// Throws RowDependent when s is (numerically) in the row space of S.
CMatrix rank1_block_inverse(const CMatrix& s, const CMatrix& row, const CMatrix& q_prev);

struct GsrtmCell {
    CMatrix a;           // P-bar_i^2 L_i
    CMatrix b;           // P-bar_i
    CMatrix a_root;
    CMatrix b_root;
    CMatrix b_inv_root;
    CMatrix t;           // B^{1/2} (I - Pi) B^{1/2}
    CMatrix x;           // B^{1/2} Pi B^{-1/2} A^{1/2} - A^{1/2}
    CMatrix g;           // gamma T + X X^*
    double gamma = 0.0;  // tr(Pi B^{-1/2} A^{1/2} B^{-1/2})
};

/// Greedy state after N accepted rows. Pi is the projector onto range(B^{1/2} S^*).
struct GsrtmState {
    CMatrix s;  // N x MK
    std::vector<double> weights;
    std::vector<GsrtmCell> cells;

    int rows() const { return static_cast<int>(s.rows()); }
};

/// A_i, B_i and their roots, with S empty so that T_i = B_i and G_i = A_i.
/// Throws SingularB when some P-bar_i is not positive definite.
GsrtmState gsrtm_init(const PilotObjectiveContext& ctx);

/// Recomputes (T_i, gamma_i, X_i, G_i) for the current S.
GsrtmState gsrtm_update(GsrtmState state);

struct BaseCaseChoice {
    Eigen::Index row = -1;
    double score = 0.0;  // sum_i w_i (s G_i s^*) / (s T_i s^*)
};

/// Best dictionary row among those with s T_i s^* > 1e-10 ||s||^2 ||T_i||_2
/// for every i. Throws NoFeasibleRow when no row qualifies.
BaseCaseChoice gsrtm_base_case(const GsrtmState& state, const CMatrix& dictionary);

struct GsrtmRun {
    PilotSet pilots;                    // scaled to the power budget
    CMatrix unscaled;                   // tau x MK, as selected
    std::vector<Eigen::Index> chosen;   // dictionary row per step
    std::vector<double> objective;      // partially_sep_objective after each step
};

GsrtmRun gsrtm_run(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg,
                   const CMatrix& dictionary);

/// tau greedy steps, then one global scale alpha = sqrt(power / max column power).
PilotSet gsrtm(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg,
               const CMatrix& dictionary);

enum class DictionaryKind { Gaussian, Qam4, Qam16 };

inline constexpr int kDefaultPilotDictionary = 300;

std::string to_string(DictionaryKind kind);

/// rows x length candidate pilot rows, all distinct. Gaussian rows are
/// i.i.d. CN(0,1); QAM rows draw unit-average-energy constellation points.
CMatrix pilot_dictionary(DictionaryKind kind, int rows, int length, Rng& rng);

/// Every cell uses the first K columns of the tau x tau DFT, column power = budget.
PilotSet baseline_orthogonal_reuse(const channel::NetworkConfig& cfg);

/// i.i.d. CN(0,1) entries, each column rescaled to norm sqrt(power).
PilotSet baseline_random(const channel::NetworkConfig& cfg, Rng& rng);

/// K orthonormal length-tau sequences: leading eigenvectors of X X^* for a
/// tau x tau Gaussian X, scaled to the power budget. Needs tau >= K.
CMatrix spa_base_sequences(const channel::NetworkConfig& cfg, Rng& rng);

/// Smart pilot assignment over a fixed orthogonal sequence set. Starting from
/// the identity assignment, cells are revisited in order; inside a cell the
/// users are ranked weakest first (smallest beta_iki) and matched to the
/// sequences ranked by interference sum_{j != i} beta_{i,k_j(q),j} from the
/// users currently holding them. Stops after a sweep with no change or
/// kSpaMaxSweeps sweeps. Needs diagonal transmit correlations and tau >= K.
PilotSet baseline_spa(const channel::CorrelationProfile& profile, const channel::NetworkConfig& cfg,
                      const CMatrix& base_sequences);

inline constexpr int kSpaMaxSweeps = 10;

/// Sequence indices chosen by baseline_spa: assign[i][k] for user k of cell i.
std::vector<std::vector<int>> spa_assignment(const channel::CorrelationProfile& profile,
                                             int sequence_count);

enum class PilotKind { Eigen, Gsrtm, OrthReuse, Random, Spa, UserSelection };

struct PilotMethod {
    PilotKind kind = PilotKind::Eigen;
    DictionaryKind dictionary = DictionaryKind::Gaussian;  // Gsrtm only
};

std::string to_string(const PilotMethod& m);
PilotMethod pilot_method_from_string(const std::string& s);

/// Dispatches to the designer selected by method. rng feeds the random
/// baseline, the SPA base set and the GSRTM dictionary.
PilotSet design_pilots(const PilotMethod& method, const channel::CorrelationProfile& profile,
                       const std::vector<double>& weights, const channel::NetworkConfig& cfg, Rng& rng,
                       int dictionary_size = kDefaultPilotDictionary);

}  // namespace pilotforge::pilots

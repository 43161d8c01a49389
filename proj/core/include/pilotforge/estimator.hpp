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

#include <vector>

#include "pilotforge/channel.hpp"
#include "pilotforge/matlin.hpp"

namespace pilotforge::estimator {

using matlin::CMatrix;

/// Per-cell pilot matrices S_i (tau x K). Column k of S_i is the sequence of
/// user k in cell i.
struct PilotSet {
    std::vector<CMatrix> cells;

    int cell_count() const { return static_cast<int>(cells.size()); }
    int tau() const { return cells.empty() ? 0 : static_cast<int>(cells.front().rows()); }
    int users() const { return cells.empty() ? 0 : static_cast<int>(cells.front().cols()); }

    /// S = [S_1, ..., S_M], tau x MK.
    CMatrix stacked() const;
    /// Column blocks (i*K .. i*K+K-1) become S_i.
    static PilotSet from_stacked(const CMatrix& s, int cells, int users);

    double max_column_power() const;
    bool satisfies_power(double power, double slack = 1e-9) const;
};

enum class FeasibleSet { Unconstrained, Unimodular };

/// Per-cell analog combiners W_i (N_RF x N_BS).
struct CombinerSet {
    std::vector<CMatrix> cells;
    FeasibleSet feasible = FeasibleSet::Unconstrained;

    /// Throws DimMismatch or InvalidConfig (non-unimodular entry in a
    /// Unimodular set, tolerance 1e-9).
    void validate() const;
};

/// What to do when the observation Gram matrix is numerically singular.
enum class GramPolicy {
    Strict,         // throw SingularGram
    RidgeFallback,  // add 1e-10 tr(G)/dim(G) I once, flag the cell, throw if still singular
};

struct EstimationReport {
    std::vector<CMatrix> h_hat;  // per cell, K*N_BS x 1
    std::vector<double> eps;     // analytic per-cell MSE
    double eps_sum = 0.0;
    double nmse_empirical = 0.0; // (1/M) sum ||h_ii - h_hat_ii||^2 / ||h_ii||^2
    bool regularized = false;
};

/// Y_i = W_i H_ii S_i^T + W_i sum_{j != i} H_ij S_j^T for every cell.
std::vector<CMatrix> receive(const channel::ChannelRealization& real, const PilotSet& pilots,
                             const CombinerSet& combiners);

/// Linear MMSE estimator of h_ii = vec(H_ii) from vec(Y_i), precomputed per
/// cell for a fixed (pilots, combiners, profile). Reusing one instance across
/// channel draws is the intended pattern for Monte-Carlo loops.
class MmseEstimator {
public:
    MmseEstimator(const PilotSet& pilots, const CombinerSet& combiners,
                  const channel::CorrelationProfile& profile, GramPolicy policy = GramPolicy::Strict);

    int cells() const { return static_cast<int>(cells_.size()); }

    CMatrix estimate(const CMatrix& y_i, int i) const;

    /// eps_i = tr(A_i) - tr(B_i C_i B_i^*)
    double analytic_mse(int i) const { return cell(i).eps; }
    /// tr(B_i C_i B_i^*)
    double captured_energy(int i) const { return cell(i).captured; }
    /// tr(A_i) = tr(P_ii) tr(Q_ii), the expected channel energy.
    double channel_energy(int i) const { return cell(i).energy; }
    bool regularized(int i) const { return cell(i).regularized; }
    bool any_regularized() const;

    double sum_mse() const;
    /// (1/M) sum_i eps_i / tr(A_i)
    double analytic_nmse() const;

    EstimationReport run(const channel::ChannelRealization& real) const;

private:
    struct Cell {
        CMatrix op;  // B_i C_i, (K N_BS) x (tau N_RF)
        double eps = 0.0;
        double captured = 0.0;
        double energy = 0.0;
        bool regularized = false;
    };

    const Cell& cell(int i) const { return cells_.at(static_cast<std::size_t>(i)); }

    PilotSet pilots_;
    CombinerSet combiners_;
    std::vector<Cell> cells_;
};

CMatrix mmse_estimate(const CMatrix& y_i, const PilotSet& pilots, const CombinerSet& combiners,
                      const channel::CorrelationProfile& profile, int i);

double analytic_mse(const PilotSet& pilots, const CombinerSet& combiners,
                    const channel::CorrelationProfile& profile, int i);

double sum_mse(const PilotSet& pilots, const CombinerSet& combiners,
               const channel::CorrelationProfile& profile);

/// w_i tr(S_i P_ii^2 S_i^* [sum_j S_j P_ij S_j^*]^{-1}): the captured energy
/// after the combiner has been folded into the scalar weight w_i. Valid when
/// Q_ij does not depend on j.
double weighted_pilot_ratio(const PilotSet& pilots, const channel::CorrelationProfile& profile,
                            int i, double weight);

}  // namespace pilotforge::estimator

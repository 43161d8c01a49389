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

/// Analog combiner design. Every routine here depends on the receive
/// correlation only, never on pilots: the per-cell weight w_i enters the
/// pilot objective as a positive multiplier, so maximizing each w_i on its
/// own is optimal for any pilot choice.
namespace pilotforge::combiner {

using estimator::CombinerSet;
using estimator::FeasibleSet;
using matlin::CMatrix;

/// w = tr(Q W^* (W Q W^*)^{-1} W Q). Throws SingularReducedGram when W Q W^*
/// has condition number above 1e14.
double weight(const CMatrix& q, const CMatrix& w);

/// tr(W Q^2 W^* (W Q W^*)^{-1}), evaluated through the orthogonal projector
/// onto range(Q^{1/2} W^*). Same value as weight(); kept as a second route.
double combiner_objective(const CMatrix& q, const CMatrix& w);

/// Rows are the conjugated eigenvectors of the n_rf largest eigenvalues of q.
CMatrix fully_digital(const CMatrix& q, int n_rf);

/// Euclidean-nearest point of the feasible set. Unimodular maps each entry
/// to e^{j arg a}, with arg 0 taken as 0.
CMatrix project_feasible(const CMatrix& a, FeasibleSet set);

struct MagiqOptions {
    double threshold = 1e-6;
    int max_iter = 200;
};

struct MagiqState {
    CMatrix t;                     // N_RF x N_RF unitary
    CMatrix w;                     // feasible combiner
    double gap = 0.0;              // ||T U^* - W||_F^2
    int iterations = 0;
    bool converged = false;        // gap < threshold
    std::vector<double> gap_trace; // gap after each iteration
};

/// Alternating minimization of ||T U^* - W||_F^2 over unitary T and feasible W,
/// starting from T = I, W = 0. Stops when the gap drops below the threshold,
/// when an iteration no longer decreases it (a fixed point), or at max_iter.
MagiqState magiq(const CMatrix& u_tilde_adj, FeasibleSet set, const MagiqOptions& opts = {});

/// Greedy dictionary combiner: adds one RF chain at a time, picking the
/// dictionary row that maximizes weight(q, [W; row]). Rows that leave
/// W Q W^* singular are skipped; DictionaryExhausted when none is left.
CMatrix grtm_combiner(const CMatrix& q, int n_rf, const CMatrix& dictionary);

/// rows x n i.i.d. uniform-phase unit-modulus entries.
CMatrix unimodular_dictionary(int rows, int n, Rng& rng);

inline constexpr int kDefaultCombinerDictionary = 300;

enum class CombinerMethod { FullyDigital, Magiq, GrtmDict, FullReceiver };

std::string to_string(CombinerMethod m);
CombinerMethod combiner_method_from_string(const std::string& s);

struct CombinerDesign {
    CombinerSet set;
    std::vector<double> weights;
};

/// Designs W_i for every cell from Q_i alone and evaluates w_i.
/// FullReceiver ignores n_rf and uses W_i = I.
CombinerDesign design_combiners(const channel::CorrelationProfile& profile, int n_rf,
                                CombinerMethod method, Rng& rng,
                                int dictionary_size = kDefaultCombinerDictionary);

}  // namespace pilotforge::combiner

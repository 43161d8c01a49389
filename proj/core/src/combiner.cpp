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

#include "pilotforge/combiner.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pilotforge::combiner {

double weight(const CMatrix& q, const CMatrix& w) {
    if (w.cols() != q.rows()) {
        throw Error(ErrorCode::DimMismatch, "weight: combiner width must equal N_BS");
    }
    const CMatrix wq = w * q;
    const CMatrix reduced = wq * w.adjoint();
    try {
        const CMatrix x = matlin::solve_hpd(reduced, wq);
        return (x * wq.adjoint()).trace().real();
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularReducedGram, e.what());
    }
}

double combiner_objective(const CMatrix& q, const CMatrix& w) {
    if (w.cols() != q.rows()) {
        throw Error(ErrorCode::DimMismatch, "combiner_objective: combiner width must equal N_BS");
    }
    const CMatrix z = matlin::psd_sqrt(q) * w.adjoint();
    Eigen::JacobiSVD<CMatrix> svd(z);
    const auto& sv = svd.singularValues();
    // cond(W Q W^*) = (s_max / s_min)^2
    if (sv.size() < w.rows() || sv(0) == 0.0 ||
        sv(sv.size() - 1) * sv(sv.size() - 1) * matlin::kMaxCondition < sv(0) * sv(0)) {
        throw Error(ErrorCode::SingularReducedGram, "combiner_objective: W Q W^* is singular");
    }
    return (matlin::range_projector(z) * q).trace().real();
}

CMatrix fully_digital(const CMatrix& q, int n_rf) {
    if (n_rf < 1 || n_rf > q.rows()) {
        throw Error(ErrorCode::InvalidConfig, "fully_digital: need 1 <= N_RF <= N_BS");
    }
    const auto eig = matlin::herm_eig(q);
    return eig.vectors.leftCols(n_rf).adjoint();
}

CMatrix project_feasible(const CMatrix& a, FeasibleSet set) {
    if (set == FeasibleSet::Unconstrained) {
        return a;
    }
    CMatrix out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double mag = std::abs(a(i, j));
            out(i, j) = mag > 0.0 ? a(i, j) / mag : matlin::Complex(1.0, 0.0);
        }
    }
    return out;
}

MagiqState magiq(const CMatrix& u_tilde_adj, FeasibleSet set, const MagiqOptions& opts) {
    if (!(opts.threshold > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "magiq: threshold must be positive");
    }
    const Eigen::Index n_rf = u_tilde_adj.rows();
    MagiqState st;
    st.t = CMatrix::Identity(n_rf, n_rf);
    st.w = CMatrix::Zero(n_rf, u_tilde_adj.cols());
    st.gap = (st.t * u_tilde_adj - st.w).squaredNorm();

    while (st.gap >= opts.threshold && st.iterations < opts.max_iter) {
        st.w = project_feasible(st.t * u_tilde_adj, set);
        Eigen::JacobiSVD<CMatrix> svd(u_tilde_adj * st.w.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        st.t = svd.matrixV() * svd.matrixU().adjoint();
        const double prev = st.gap;
        st.gap = (st.t * u_tilde_adj - st.w).squaredNorm();
        st.gap_trace.push_back(st.gap);
        ++st.iterations;
        if (st.iterations > 1 && prev - st.gap <= 1e-14 * prev) {
            break;
        }
    }
    st.converged = st.gap < opts.threshold;
    return st;
}

CMatrix grtm_combiner(const CMatrix& q, int n_rf, const CMatrix& dictionary) {
    if (dictionary.cols() != q.rows()) {
        throw Error(ErrorCode::DimMismatch, "grtm_combiner: dictionary rows must have N_BS entries");
    }
    if (n_rf < 1 || dictionary.rows() < n_rf) {
        throw Error(ErrorCode::DictionaryExhausted, "grtm_combiner: dictionary smaller than N_RF");
    }
    CMatrix w(0, q.rows());
    for (int step = 0; step < n_rf; ++step) {
        double best = -std::numeric_limits<double>::infinity();
        Eigen::Index best_row = -1;
        CMatrix trial(w.rows() + 1, q.rows());
        trial.topRows(w.rows()) = w;
        for (Eigen::Index r = 0; r < dictionary.rows(); ++r) {
            trial.row(w.rows()) = dictionary.row(r);
            double value = 0.0;
            try {
                value = weight(q, trial);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularReducedGram) throw;
                continue;
            }
            if (value > best) {
                best = value;
                best_row = r;
            }
        }
        if (best_row < 0) {
            throw Error(ErrorCode::DictionaryExhausted,
                        "grtm_combiner: no dictionary row increases the rank at step " + std::to_string(step));
        }
        trial.row(w.rows()) = dictionary.row(best_row);
        w = trial;
    }
    return w;
}

CMatrix unimodular_dictionary(int rows, int n, Rng& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CMatrix d(rows, n);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            d(i, j) = std::polar(1.0, phase(rng));
        }
    }
    return d;
}

std::string to_string(CombinerMethod m) {
    switch (m) {
        case CombinerMethod::FullyDigital: return "fully-digital";
        case CombinerMethod::Magiq: return "magiq";
        case CombinerMethod::GrtmDict: return "grtm";
        case CombinerMethod::FullReceiver: return "full-receiver";
    }
    return "unknown";
}

CombinerMethod combiner_method_from_string(const std::string& s) {
    for (auto m : {CombinerMethod::FullyDigital, CombinerMethod::Magiq, CombinerMethod::GrtmDict,
                   CombinerMethod::FullReceiver}) {
        if (to_string(m) == s) return m;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown combiner method '" + s + "'");
}

CombinerDesign design_combiners(const channel::CorrelationProfile& profile, int n_rf,
                                CombinerMethod method, Rng& rng, int dictionary_size) {
    CombinerDesign out;
    const int m = profile.cells();
    const int n_bs = profile.antennas();
    out.set.feasible = (method == CombinerMethod::Magiq || method == CombinerMethod::GrtmDict)
                           ? FeasibleSet::Unimodular
                           : FeasibleSet::Unconstrained;
    CMatrix dictionary;
    if (method == CombinerMethod::GrtmDict) {
        dictionary = unimodular_dictionary(dictionary_size, n_bs, rng);
    }
    for (int i = 0; i < m; ++i) {
        const CMatrix q = profile.q(i, i);
        CMatrix w;
        switch (method) {
            case CombinerMethod::FullyDigital: w = fully_digital(q, n_rf); break;
            case CombinerMethod::Magiq:
                w = magiq(fully_digital(q, n_rf), FeasibleSet::Unimodular).w;
                break;
            case CombinerMethod::GrtmDict: w = grtm_combiner(q, n_rf, dictionary); break;
            case CombinerMethod::FullReceiver: w = CMatrix::Identity(n_bs, n_bs); break;
        }
        out.weights.push_back(weight(q, w));
        out.set.cells.push_back(std::move(w));
    }
    return out;
}

}  // namespace pilotforge::combiner

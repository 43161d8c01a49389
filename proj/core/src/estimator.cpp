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

#include "pilotforge/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace pilotforge::estimator {

using matlin::CMatrix;

CMatrix PilotSet::stacked() const {
    if (cells.empty()) {
        return CMatrix(0, 0);
    }
    const Eigen::Index k = cells.front().cols();
    CMatrix s(cells.front().rows(), k * static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        s.middleCols(static_cast<Eigen::Index>(i) * k, k) = cells[i];
    }
    return s;
}

PilotSet PilotSet::from_stacked(const CMatrix& s, int cells, int users) {
    if (s.cols() != static_cast<Eigen::Index>(cells) * users) {
        throw Error(ErrorCode::DimMismatch, "stacked pilot matrix must have M*K columns");
    }
    PilotSet out;
    for (int i = 0; i < cells; ++i) {
        out.cells.push_back(s.middleCols(static_cast<Eigen::Index>(i) * users, users));
    }
    return out;
}

double PilotSet::max_column_power() const {
    double best = 0.0;
    for (const auto& s : cells) {
        if (s.size() > 0) {
            best = std::max(best, matlin::column_power(s).maxCoeff());
        }
    }
    return best;
}

bool PilotSet::satisfies_power(double power, double slack) const {
    return max_column_power() <= power + slack;
}

void CombinerSet::validate() const {
    if (cells.empty()) {
        throw Error(ErrorCode::DimMismatch, "combiner set is empty");
    }
    for (const auto& w : cells) {
        if (w.rows() != cells.front().rows() || w.cols() != cells.front().cols()) {
            throw Error(ErrorCode::DimMismatch, "combiners must share dimensions");
        }
        if (feasible == FeasibleSet::Unimodular) {
            if ((w.cwiseAbs().array() - 1.0).abs().maxCoeff() > 1e-9) {
                throw Error(ErrorCode::InvalidConfig, "unimodular combiner has an entry with |w| != 1");
            }
        }
    }
}

std::vector<CMatrix> receive(const channel::ChannelRealization& real, const PilotSet& pilots,
                             const CombinerSet& combiners) {
    const int m = real.cells;
    if (pilots.cell_count() != m || static_cast<int>(combiners.cells.size()) != m) {
        throw Error(ErrorCode::DimMismatch, "receive: cell counts disagree");
    }
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const CMatrix& w = combiners.cells[static_cast<std::size_t>(i)];
        CMatrix acc = CMatrix::Zero(real.at(i, 0).rows(), pilots.tau());
        for (int j = 0; j < m; ++j) {
            const CMatrix& h = real.at(i, j);
            const CMatrix& s = pilots.cells[static_cast<std::size_t>(j)];
            if (h.cols() != s.cols() || w.cols() != h.rows()) {
                throw Error(ErrorCode::DimMismatch, "receive: channel/pilot/combiner shapes disagree");
            }
            acc.noalias() += h * s.transpose();
        }
        out.push_back(w * acc);
    }
    return out;
}

MmseEstimator::MmseEstimator(const PilotSet& pilots, const CombinerSet& combiners,
                             const channel::CorrelationProfile& profile, GramPolicy policy)
    : pilots_(pilots), combiners_(combiners) {
    const int m = profile.cells();
    if (pilots.cell_count() != m || static_cast<int>(combiners.cells.size()) != m) {
        throw Error(ErrorCode::DimMismatch, "estimator: cell counts disagree");
    }
    if (pilots.users() != profile.users() || combiners.cells.front().cols() != profile.antennas()) {
        throw Error(ErrorCode::DimMismatch, "estimator: dimensions disagree with the profile");
    }
    cells_.resize(static_cast<std::size_t>(m));
    // Q_ij = Q_i for every supported profile, so the Gram matrix factors as
    // G_i = (sum_j S_j P_ij S_j^*) (x) (W_i Q_i W_i^*) and both solves stay small.
    for (int i = 0; i < m; ++i) {
        const CMatrix& w = combiners.cells[static_cast<std::size_t>(i)];
        const CMatrix& s_i = pilots.cells[static_cast<std::size_t>(i)];
        const CMatrix p_ii = profile.p(i, i);
        const CMatrix q_ii = profile.q(i, i);
        CMatrix a = CMatrix::Zero(pilots.tau(), pilots.tau());
        for (int j = 0; j < m; ++j) {
            const CMatrix& s = pilots.cells[static_cast<std::size_t>(j)];
            a += s * profile.p(i, j) * s.adjoint();
        }
        a = 0.5 * (a + a.adjoint());
        CMatrix r = w * q_ii * w.adjoint();
        r = 0.5 * (r + r.adjoint());
        const CMatrix sp = s_i * p_ii;  // S_i P_ii
        const CMatrix wq = w * q_ii;    // W_i Q_ii

        Cell& c = cells_[static_cast<std::size_t>(i)];
        const Eigen::SelfAdjointEigenSolver<CMatrix> ea(a);
        const Eigen::SelfAdjointEigenSolver<CMatrix> er(r);
        const Eigen::VectorXd la = ea.eigenvalues();
        const Eigen::VectorXd lr = er.eigenvalues();
        const double hi = la.maxCoeff() * lr.maxCoeff();
        const double lo = la.minCoeff() * lr.minCoeff();
        const bool singular = !(la.minCoeff() > 0.0 && lr.minCoeff() > 0.0) || !(hi < matlin::kMaxCondition * lo);

        CMatrix x;  // G_i^{-1} B_i^*
        if (!singular) {
            try {
                const CMatrix xa = matlin::solve_hpd(a, sp);
                const CMatrix xr = matlin::solve_hpd(r, wq);
                x = matlin::kron(xa, xr);
                c.captured = (sp.adjoint() * xa).trace().real() * (wq.adjoint() * xr).trace().real();
            } catch (const Error& e) {
                throw Error(ErrorCode::SingularGram, "cell " + std::to_string(i) + ": " + e.what());
            }
        } else {
            if (policy == GramPolicy::Strict) {
                throw Error(ErrorCode::SingularGram, "cell " + std::to_string(i) + ": Gram matrix is singular");
            }
            const double dim = static_cast<double>(la.size() * lr.size());
            const double ridge = 1e-10 * la.sum() * lr.sum() / dim;
            const double lo_r = std::max(lo, 0.0) + ridge;
            if (!(ridge > 0.0) || !(hi + ridge < matlin::kMaxCondition * lo_r)) {
                throw Error(ErrorCode::SingularGram, "cell " + std::to_string(i) + ": singular after ridge");
            }
            // (G + c I)^{-1} = (U_a (x) U_r) (L_a (x) L_r + c I)^{-1} (U_a (x) U_r)^*
            const CMatrix ua = ea.eigenvectors();
            const CMatrix ur = er.eigenvectors();
            CMatrix e = matlin::kron(ua.adjoint() * sp, ur.adjoint() * wq);
            for (Eigen::Index p = 0; p < la.size(); ++p) {
                for (Eigen::Index q = 0; q < lr.size(); ++q) {
                    const double d = std::max(la(p) * lr(q), 0.0) + ridge;
                    e.row(p * lr.size() + q) /= d;
                }
            }
            x = matlin::kron(ua, ur) * e;
            // tr(B_i G_i^{-1} B_i^*)
            c.captured = (matlin::kron(sp, wq).adjoint() * x).trace().real();
            c.regularized = true;
        }
        c.op = x.adjoint();
        c.energy = matlin::real_trace(p_ii) * matlin::real_trace(q_ii);
        c.eps = std::max(c.energy - c.captured, 0.0);
    }
}

CMatrix MmseEstimator::estimate(const CMatrix& y_i, int i) const {
    const Cell& c = cell(i);
    if (y_i.size() != c.op.cols()) {
        throw Error(ErrorCode::DimMismatch, "estimate: observation has the wrong size");
    }
    return c.op * matlin::vec(y_i);
}

bool MmseEstimator::any_regularized() const {
    return std::any_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.regularized; });
}

double MmseEstimator::sum_mse() const {
    double acc = 0.0;
    for (const auto& c : cells_) acc += c.eps;
    return acc;
}

double MmseEstimator::analytic_nmse() const {
    double acc = 0.0;
    for (const auto& c : cells_) acc += c.energy > 0.0 ? c.eps / c.energy : 0.0;
    return acc / static_cast<double>(cells_.size());
}

EstimationReport MmseEstimator::run(const channel::ChannelRealization& real) const {
    const auto ys = receive(real, pilots_, combiners_);
    EstimationReport rep;
    double nmse = 0.0;
    for (int i = 0; i < cells(); ++i) {
        CMatrix h = real.vec(i, i);
        CMatrix h_hat = estimate(ys[static_cast<std::size_t>(i)], i);
        const double energy = h.squaredNorm();
        nmse += energy > 0.0 ? (h - h_hat).squaredNorm() / energy : 0.0;
        rep.h_hat.push_back(std::move(h_hat));
        rep.eps.push_back(analytic_mse(i));
    }
    rep.eps_sum = sum_mse();
    rep.nmse_empirical = nmse / static_cast<double>(cells());
    rep.regularized = any_regularized();
    return rep;
}

CMatrix mmse_estimate(const CMatrix& y_i, const PilotSet& pilots, const CombinerSet& combiners,
                      const channel::CorrelationProfile& profile, int i) {
    return MmseEstimator(pilots, combiners, profile).estimate(y_i, i);
}

double analytic_mse(const PilotSet& pilots, const CombinerSet& combiners,
                    const channel::CorrelationProfile& profile, int i) {
    return MmseEstimator(pilots, combiners, profile).analytic_mse(i);
}

double sum_mse(const PilotSet& pilots, const CombinerSet& combiners,
               const channel::CorrelationProfile& profile) {
    return MmseEstimator(pilots, combiners, profile).sum_mse();
}

double weighted_pilot_ratio(const PilotSet& pilots, const channel::CorrelationProfile& profile,
                            int i, double weight) {
    const int m = profile.cells();
    CMatrix denom = CMatrix::Zero(pilots.tau(), pilots.tau());
    for (int j = 0; j < m; ++j) {
        const CMatrix& s = pilots.cells[static_cast<std::size_t>(j)];
        denom += s * profile.p(i, j) * s.adjoint();
    }
    const CMatrix& s_i = pilots.cells[static_cast<std::size_t>(i)];
    const CMatrix p_ii = profile.p(i, i);
    const CMatrix num = s_i * p_ii * p_ii * s_i.adjoint();
    try {
        return weight * matlin::solve_hpd(denom, num).trace().real();
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularGram, e.what());
    }
}

}  // namespace pilotforge::estimator

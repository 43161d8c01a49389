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

#include "pilotforge/pilots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace pilotforge::pilots {

namespace {

const CMatrix& shared_p_bar(const PilotObjectiveContext& ctx) {
    if (!ctx.shared || ctx.p_bar.empty()) {
        throw Error(ErrorCode::InvalidConfig,
                    "objective needs a fully-separable (shared) transmit assembly");
    }
    return ctx.p_bar.front();
}

double ratio_trace(const CMatrix& num, const CMatrix& denom) {
    try {
        return matlin::solve_hpd(denom, num).trace().real();
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularGram, e.what());
    }
}

// Real parts of d_r G d_r^* for every row d_r of dict.
Eigen::VectorXd row_quadratic_forms(const CMatrix& dict, const CMatrix& g) {
    return (dict * g).cwiseProduct(dict.conjugate()).rowwise().sum().real();
}

}  // namespace

CMatrix PilotObjectiveContext::weight_matrix() const {
    CMatrix w = CMatrix::Zero(total_users(), total_users());
    for (int i = 0; i < cells; ++i) {
        for (int k = 0; k < users; ++k) {
            w(i * users + k, i * users + k) = weights[static_cast<std::size_t>(i)];
        }
    }
    return w;
}

CMatrix PilotObjectiveContext::selector(int i) const {
    CMatrix z = CMatrix::Zero(cells, cells);
    z(i, i) = 1.0;
    return matlin::kron(z, CMatrix::Identity(users, users));
}

CMatrix PilotObjectiveContext::weighted_transmit() const {
    return weight_matrix() * shared_p_bar(*this);
}

PilotObjectiveContext make_context(const channel::CorrelationProfile& profile,
                                   std::vector<double> weights) {
    if (static_cast<int>(weights.size()) != profile.cells()) {
        throw Error(ErrorCode::DimMismatch, "make_context: need one weight per cell");
    }
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidConfig, "make_context: weights must be finite and non-negative");
        }
    }
    const auto eff = channel::effective_p_matrices(profile);
    PilotObjectiveContext ctx;
    ctx.cells = profile.cells();
    ctx.users = profile.users();
    ctx.weights = std::move(weights);
    ctx.p_bar = eff.p_bar;
    ctx.shared = std::all_of(ctx.p_bar.begin(), ctx.p_bar.end(),
                             [&](const CMatrix& p) { return p == ctx.p_bar.front(); });
    return ctx;
}

double fully_sep_objective(const CMatrix& s, const PilotObjectiveContext& ctx) {
    const CMatrix& p = shared_p_bar(ctx);
    const CMatrix sp = s * p;
    const CMatrix num = sp * ctx.weight_matrix() * sp.adjoint();
    return ratio_trace(num, sp * s.adjoint());
}

double partially_sep_objective(const CMatrix& s, const PilotObjectiveContext& ctx) {
    double total = 0.0;
    for (int i = 0; i < ctx.cells; ++i) {
        const CMatrix& p = ctx.p_bar[static_cast<std::size_t>(i)];
        const CMatrix sp = s * p;
        const CMatrix num = sp * p * ctx.selector(i) * s.adjoint();
        total += ctx.weights[static_cast<std::size_t>(i)] * ratio_trace(num, sp * s.adjoint());
    }
    return total;
}

PilotSet eigen_pilots(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg) {
    const CMatrix& p = shared_p_bar(ctx);
    const int k = ctx.users;
    const int mk = ctx.total_users();
    if (cfg.tau < 1 || cfg.tau > mk) {
        throw Error(ErrorCode::InvalidConfig, "eigen_pilots: need 1 <= tau <= M*K");
    }

    struct Candidate {
        double value;
        int cell;
        Eigen::Index index;
    };
    std::vector<Candidate> candidates;
    std::vector<matlin::HermEig> blocks;
    for (int j = 0; j < ctx.cells; ++j) {
        blocks.push_back(matlin::herm_eig(p.block(j * k, j * k, k, k)));
        for (Eigen::Index n = 0; n < k; ++n) {
            candidates.push_back({ctx.weights[static_cast<std::size_t>(j)] * blocks.back().values(n), j, n});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.value > y.value; });

    CMatrix u1 = CMatrix::Zero(mk, cfg.tau);
    for (int c = 0; c < cfg.tau; ++c) {
        const auto& cand = candidates[static_cast<std::size_t>(c)];
        u1.block(cand.cell * k, c, k, 1) = blocks[static_cast<std::size_t>(cand.cell)].vectors.col(cand.index);
    }
    return PilotSet::from_stacked(std::sqrt(cfg.power) * u1.adjoint(), ctx.cells, k);
}

PilotSet user_selection(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg) {
    const CMatrix& p = shared_p_bar(ctx);
    CMatrix off = p;
    off.diagonal().setZero();
    if (off.norm() != 0.0) {
        throw Error(ErrorCode::InvalidConfig, "user_selection: transmit correlations must be diagonal");
    }
    const int mk = ctx.total_users();
    if (cfg.tau < 1 || cfg.tau > mk) {
        throw Error(ErrorCode::InvalidConfig, "user_selection: need 1 <= tau <= M*K");
    }
    std::vector<int> order(static_cast<std::size_t>(mk));
    std::iota(order.begin(), order.end(), 0);
    auto d = [&](int col) { return ctx.weights[static_cast<std::size_t>(col / ctx.users)] * p(col, col).real(); };
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d(x) > d(y); });

    CMatrix s = CMatrix::Zero(cfg.tau, mk);
    for (int r = 0; r < cfg.tau; ++r) {
        s(r, order[static_cast<std::size_t>(r)]) = std::sqrt(cfg.power);
    }
    return PilotSet::from_stacked(s, ctx.cells, ctx.users);
}

CMatrix rank1_block_inverse(const CMatrix& s, const CMatrix& row, const CMatrix& q_prev) {
    if (row.rows() != 1 || (s.rows() > 0 && row.cols() != s.cols())) {
        throw Error(ErrorCode::DimMismatch, "rank1_block_inverse: row must be 1 x MK");
    }
    const Eigen::Index n = s.rows();
    const double row_energy = row.squaredNorm();
    CMatrix out(n + 1, n + 1);
    if (n == 0) {
        if (!(row_energy > 0.0)) {
            throw Error(ErrorCode::RowDependent, "rank1_block_inverse: zero row");
        }
        out(0, 0) = 1.0 / row_energy;
        return out;
    }
    const CMatrix u = s * row.adjoint();  // S s^*
    const CMatrix qu = q_prev * u;
    const double denom = row_energy - (u.adjoint() * qu)(0, 0).real();
    if (!(denom > 1e-12 * row_energy)) {
        throw Error(ErrorCode::RowDependent, "rank1_block_inverse: row lies in the row space of S");
    }
    const double alpha = 1.0 / denom;
    out.topLeftCorner(n, n) = q_prev + alpha * qu * qu.adjoint();
    out.topRightCorner(n, 1) = -alpha * qu;
    out.bottomLeftCorner(1, n) = -alpha * qu.adjoint();
    out(n, n) = alpha;
    return out;
}

GsrtmState gsrtm_init(const PilotObjectiveContext& ctx) {
    GsrtmState st;
    st.s = CMatrix(0, ctx.total_users());
    st.weights = ctx.weights;
    for (int i = 0; i < ctx.cells; ++i) {
        GsrtmCell c;
        c.b = ctx.p_bar[static_cast<std::size_t>(i)];
        c.a = c.b * c.b * ctx.selector(i);
        c.a = 0.5 * (c.a + c.a.adjoint());
        c.a_root = matlin::psd_sqrt(c.a);
        c.b_root = matlin::psd_sqrt(c.b);
        try {
            c.b_inv_root = matlin::psd_inv_sqrt(c.b);
        } catch (const Error& e) {
            throw Error(ErrorCode::SingularB, "cell " + std::to_string(i) + ": " + e.what());
        }
        c.t = c.b;
        c.g = c.a;
        c.x = -c.a_root;
        c.gamma = 0.0;
        st.cells.push_back(std::move(c));
    }
    return st;
}

GsrtmState gsrtm_update(GsrtmState state) {
    const Eigen::Index mk = state.s.cols();
    const CMatrix eye = CMatrix::Identity(mk, mk);
    for (auto& c : state.cells) {
        const CMatrix proj = matlin::range_projector(c.b_root * state.s.adjoint());
        c.t = c.b_root * (eye - proj) * c.b_root;
        c.t = 0.5 * (c.t + c.t.adjoint());
        c.gamma = (proj * c.b_inv_root * c.a_root * c.b_inv_root).trace().real();
        c.x = c.b_root * proj * c.b_inv_root * c.a_root - c.a_root;
        c.g = c.gamma * c.t + c.x * c.x.adjoint();
        c.g = 0.5 * (c.g + c.g.adjoint());
    }
    return state;
}

BaseCaseChoice gsrtm_base_case(const GsrtmState& state, const CMatrix& dictionary) {
    if (dictionary.rows() == 0) {
        throw Error(ErrorCode::NoFeasibleRow, "gsrtm_base_case: empty dictionary");
    }
    if (dictionary.cols() != state.s.cols()) {
        throw Error(ErrorCode::DimMismatch, "gsrtm_base_case: dictionary rows must have M*K entries");
    }
    const Eigen::Index n = dictionary.rows();
    const Eigen::VectorXd row_energy = dictionary.rowwise().squaredNorm();
    Eigen::VectorXd score = Eigen::VectorXd::Zero(n);
    std::vector<bool> feasible(static_cast<std::size_t>(n), true);

    for (std::size_t i = 0; i < state.cells.size(); ++i) {
        const auto& c = state.cells[i];
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c.t, Eigen::EigenvaluesOnly);
        const double t_norm = std::max(es.eigenvalues().maxCoeff(), 0.0);
        const Eigen::VectorXd num = row_quadratic_forms(dictionary, c.g);
        const Eigen::VectorXd den = row_quadratic_forms(dictionary, c.t);
        for (Eigen::Index r = 0; r < n; ++r) {
            if (!(den(r) > 1e-10 * row_energy(r) * t_norm)) {
                feasible[static_cast<std::size_t>(r)] = false;
                continue;
            }
            score(r) += state.weights[i] * num(r) / den(r);
        }
    }

    BaseCaseChoice best;
    best.score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < n; ++r) {
        if (feasible[static_cast<std::size_t>(r)] && score(r) > best.score) {
            best.score = score(r);
            best.row = r;
        }
    }
    if (best.row < 0) {
        throw Error(ErrorCode::NoFeasibleRow, "gsrtm_base_case: every dictionary row is in the row space");
    }
    return best;
}

GsrtmRun gsrtm_run(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg,
                   const CMatrix& dictionary) {
    if (cfg.tau < 1 || cfg.tau > ctx.total_users()) {
        throw Error(ErrorCode::InvalidConfig, "gsrtm: need 1 <= tau <= M*K");
    }
    GsrtmRun run;
    GsrtmState state = gsrtm_init(ctx);
    for (int step = 0; step < cfg.tau; ++step) {
        const BaseCaseChoice choice = gsrtm_base_case(state, dictionary);
        CMatrix grown(state.s.rows() + 1, state.s.cols());
        grown.topRows(state.s.rows()) = state.s;
        grown.row(state.s.rows()) = dictionary.row(choice.row);
        state.s = std::move(grown);
        state = gsrtm_update(std::move(state));
        run.chosen.push_back(choice.row);
        run.objective.push_back(partially_sep_objective(state.s, ctx));
    }
    run.unscaled = state.s;
    const double peak = matlin::column_power(state.s).maxCoeff();
    const double alpha = std::sqrt(cfg.power / peak);
    run.pilots = PilotSet::from_stacked(alpha * state.s, ctx.cells, ctx.users);
    return run;
}

PilotSet gsrtm(const PilotObjectiveContext& ctx, const channel::NetworkConfig& cfg,
               const CMatrix& dictionary) {
    return gsrtm_run(ctx, cfg, dictionary).pilots;
}

std::string to_string(DictionaryKind kind) {
    switch (kind) {
        case DictionaryKind::Gaussian: return "gaussian";
        case DictionaryKind::Qam4: return "qam4";
        case DictionaryKind::Qam16: return "qam16";
    }
    return "unknown";
}

CMatrix pilot_dictionary(DictionaryKind kind, int rows, int length, Rng& rng) {
    if (rows < 1 || length < 1) {
        throw Error(ErrorCode::InvalidConfig, "pilot_dictionary: need rows >= 1 and length >= 1");
    }
    if (kind != DictionaryKind::Gaussian) {
        const double alphabet = kind == DictionaryKind::Qam4 ? 4.0 : 16.0;
        if (static_cast<double>(rows) > std::pow(alphabet, length)) {
            throw Error(ErrorCode::DictionaryExhausted, "pilot_dictionary: not enough distinct " +
                                                            to_string(kind) + " rows");
        }
    }
    auto draw = [&]() -> matlin::Complex {
        switch (kind) {
            case DictionaryKind::Gaussian: return complex_normal(rng);
            case DictionaryKind::Qam4: {
                std::uniform_int_distribution<int> bit(0, 1);
                const double re = bit(rng) ? 1.0 : -1.0;
                const double im = bit(rng) ? 1.0 : -1.0;
                return matlin::Complex(re, im) / std::numbers::sqrt2;
            }
            case DictionaryKind::Qam16: {
                std::uniform_int_distribution<int> level(0, 3);
                const double re = 2.0 * level(rng) - 3.0;
                const double im = 2.0 * level(rng) - 3.0;
                return matlin::Complex(re, im) / std::sqrt(10.0);
            }
        }
        return {};
    };
    CMatrix dict(rows, length);
    Eigen::Index filled = 0;
    while (filled < rows) {
        for (Eigen::Index c = 0; c < length; ++c) {
            dict(filled, c) = draw();
        }
        bool duplicate = false;
        for (Eigen::Index r = 0; r < filled && !duplicate; ++r) {
            duplicate = dict.row(r) == dict.row(filled);
        }
        if (!duplicate) {
            ++filled;
        }
    }
    return dict;
}

PilotSet baseline_orthogonal_reuse(const channel::NetworkConfig& cfg) {
    if (cfg.tau < cfg.users) {
        throw Error(ErrorCode::InvalidConfig, "orthogonal reuse needs tau >= K");
    }
    CMatrix s(cfg.tau, cfg.users);
    const double scale = std::sqrt(cfg.power / cfg.tau);
    for (int r = 0; r < cfg.tau; ++r) {
        for (int c = 0; c < cfg.users; ++c) {
            const double angle = -2.0 * std::numbers::pi * r * c / cfg.tau;
            s(r, c) = std::polar(scale, angle);
        }
    }
    PilotSet out;
    out.cells.assign(static_cast<std::size_t>(cfg.cells), s);
    return out;
}

PilotSet baseline_random(const channel::NetworkConfig& cfg, Rng& rng) {
    PilotSet out;
    for (int i = 0; i < cfg.cells; ++i) {
        CMatrix s(cfg.tau, cfg.users);
        for (int c = 0; c < cfg.users; ++c) {
            for (int r = 0; r < cfg.tau; ++r) {
                s(r, c) = complex_normal(rng);
            }
            s.col(c) *= std::sqrt(cfg.power) / s.col(c).norm();
        }
        out.cells.push_back(std::move(s));
    }
    return out;
}

CMatrix spa_base_sequences(const channel::NetworkConfig& cfg, Rng& rng) {
    if (cfg.tau < cfg.users) {
        throw Error(ErrorCode::DimMismatch, "SPA needs tau >= K");
    }
    CMatrix x(cfg.tau, cfg.tau);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            x(i, j) = complex_normal(rng);
        }
    }
    const auto eig = matlin::herm_eig(x * x.adjoint());
    return std::sqrt(cfg.power) * eig.vectors.leftCols(cfg.users);
}

std::vector<std::vector<int>> spa_assignment(const channel::CorrelationProfile& profile,
                                             int sequence_count) {
    const int m = profile.cells();
    const int k = profile.users();
    if (sequence_count < k) {
        throw Error(ErrorCode::DimMismatch, "SPA needs at least K sequences");
    }
    if (!profile.transmit_diagonal()) {
        throw Error(ErrorCode::InvalidConfig, "SPA needs diagonal transmit correlations");
    }
    const auto sc = static_cast<std::size_t>(sequence_count);
    // Start from user k -> sequence k everywhere, then revisit the cells in
    // turn until a full sweep leaves every assignment unchanged.
    std::vector<std::vector<int>> assign(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(k)));
    for (auto& cell : assign) std::iota(cell.begin(), cell.end(), 0);

    for (int sweep = 0; sweep < kSpaMaxSweeps; ++sweep) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            // interference seen at BS i on each sequence from the other cells' current holders
            std::vector<double> score(sc, 0.0);
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                for (int u = 0; u < k; ++u) {
                    score[static_cast<std::size_t>(assign[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)])] +=
                        profile.transmit_gain(i, u, j);
                }
            }
            std::vector<int> users(static_cast<std::size_t>(k));
            std::iota(users.begin(), users.end(), 0);
            std::stable_sort(users.begin(), users.end(), [&](int a, int b) {
                return profile.transmit_gain(i, a, i) < profile.transmit_gain(i, b, i);
            });
            std::vector<int> seqs(sc);
            std::iota(seqs.begin(), seqs.end(), 0);
            std::stable_sort(seqs.begin(), seqs.end(), [&](int a, int b) {
                return score[static_cast<std::size_t>(a)] < score[static_cast<std::size_t>(b)];
            });
            auto& cell = assign[static_cast<std::size_t>(i)];
            for (int n = 0; n < k; ++n) {
                const int user = users[static_cast<std::size_t>(n)];
                const int seq = seqs[static_cast<std::size_t>(n)];
                changed = changed || cell[static_cast<std::size_t>(user)] != seq;
                cell[static_cast<std::size_t>(user)] = seq;
            }
        }
        if (!changed) break;
    }
    return assign;
}

PilotSet baseline_spa(const channel::CorrelationProfile& profile, const channel::NetworkConfig& cfg,
                      const CMatrix& base_sequences) {
    if (cfg.tau < cfg.users || base_sequences.rows() != cfg.tau) {
        throw Error(ErrorCode::DimMismatch, "SPA needs tau >= K and length-tau sequences");
    }
    const auto assign = spa_assignment(profile, static_cast<int>(base_sequences.cols()));
    PilotSet out;
    for (const auto& cell : assign) {
        CMatrix s(cfg.tau, cfg.users);
        for (int k = 0; k < cfg.users; ++k) {
            const auto col = base_sequences.col(cell[static_cast<std::size_t>(k)]);
            s.col(k) = std::sqrt(cfg.power) * col / col.norm();
        }
        out.cells.push_back(std::move(s));
    }
    return out;
}

std::string to_string(const PilotMethod& m) {
    switch (m.kind) {
        case PilotKind::Eigen: return "eigen";
        case PilotKind::Gsrtm: return "gsrtm-" + to_string(m.dictionary);
        case PilotKind::OrthReuse: return "orth-reuse";
        case PilotKind::Random: return "random";
        case PilotKind::Spa: return "spa";
        case PilotKind::UserSelection: return "user-selection";
    }
    return "unknown";
}

PilotMethod pilot_method_from_string(const std::string& s) {
    if (s == "gsrtm") return {PilotKind::Gsrtm, DictionaryKind::Gaussian};
    for (auto kind : {PilotKind::Eigen, PilotKind::OrthReuse, PilotKind::Random, PilotKind::Spa,
                      PilotKind::UserSelection}) {
        if (to_string(PilotMethod{kind, DictionaryKind::Gaussian}) == s) return {kind, DictionaryKind::Gaussian};
    }
    for (auto dict : {DictionaryKind::Gaussian, DictionaryKind::Qam4, DictionaryKind::Qam16}) {
        if (to_string(PilotMethod{PilotKind::Gsrtm, dict}) == s) return {PilotKind::Gsrtm, dict};
    }
    throw Error(ErrorCode::InvalidConfig, "unknown pilot method '" + s + "'");
}

PilotSet design_pilots(const PilotMethod& method, const channel::CorrelationProfile& profile,
                       const std::vector<double>& weights, const channel::NetworkConfig& cfg, Rng& rng,
                       int dictionary_size) {
    switch (method.kind) {
        case PilotKind::Eigen: return eigen_pilots(make_context(profile, weights), cfg);
        case PilotKind::UserSelection: return user_selection(make_context(profile, weights), cfg);
        case PilotKind::Gsrtm: {
            const auto ctx = make_context(profile, weights);
            const CMatrix dict = pilot_dictionary(method.dictionary, dictionary_size, ctx.total_users(), rng);
            return gsrtm(ctx, cfg, dict);
        }
        case PilotKind::OrthReuse: return baseline_orthogonal_reuse(cfg);
        case PilotKind::Random: return baseline_random(cfg, rng);
        case PilotKind::Spa: return baseline_spa(profile, cfg, spa_base_sequences(cfg, rng));
    }
    throw Error(ErrorCode::InvalidConfig, "unhandled pilot method");
}

}  // namespace pilotforge::pilots

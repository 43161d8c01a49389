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

#include "pilotforge/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "pilotforge/channel.hpp"
#include "pilotforge/combiner.hpp"
#include "pilotforge/errors.hpp"
#include "pilotforge/estimator.hpp"
#include "pilotforge/matlin.hpp"
#include "pilotforge/pilots.hpp"
#include "pilotforge/rng.hpp"

namespace pilotforge::selftest {

namespace {

using matlin::CMatrix;

constexpr std::uint64_t kSeed = 20240611;

CMatrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    CMatrix x(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = complex_normal(rng);
    }
    return x;
}

channel::NetworkConfig small_cfg(int tau) {
    channel::NetworkConfig cfg;
    cfg.cells = 2;
    cfg.users = 2;
    cfg.antennas = 3;
    cfg.rf_chains = 2;
    cfg.tau = tau;
    return cfg;
}

channel::CorrelationProfile random_partial(const channel::NetworkConfig& cfg, Rng& rng) {
    channel::PartiallySeparable ps;
    for (int i = 0; i < cfg.cells; ++i) {
        const CMatrix x = gaussian(cfg.antennas, cfg.antennas, rng);
        ps.q.push_back(x * x.adjoint());
    }
    for (int n = 0; n < cfg.cells * cfg.cells; ++n) {
        const CMatrix x = gaussian(cfg.users, cfg.users, rng);
        ps.p.push_back(x * x.adjoint() + 0.1 * CMatrix::Identity(cfg.users, cfg.users));
    }
    return channel::CorrelationProfile(std::move(ps));
}

// Returns an empty string on success, otherwise a failure description.
using Check = std::function<std::string()>;

std::string power_feasibility() {
    Rng rng = derive_stream(kSeed, 1, 0, StreamTag::Profile);
    std::ostringstream bad;
    for (int trial = 0; trial < 10; ++trial) {
        const auto cfg = small_cfg(3);
        const auto fs = channel::make_random_fully_separable(cfg, rng);
        const auto ps = random_partial(cfg, rng);
        const std::vector<double> w{1.0, 0.7};
        using pilots::PilotKind;
        for (auto kind : {PilotKind::Eigen, PilotKind::Gsrtm, PilotKind::OrthReuse, PilotKind::Random,
                          PilotKind::Spa, PilotKind::UserSelection}) {
            const pilots::PilotMethod m{kind, pilots::DictionaryKind::Gaussian};
            const auto& prof = (kind == PilotKind::Gsrtm) ? ps : fs;
            const auto set = pilots::design_pilots(m, prof, w, cfg, rng, 40);
            if (!set.satisfies_power(cfg.power)) bad << pilots::to_string(m) << " ";
        }
    }
    return bad.str().empty() ? "" : "over budget: " + bad.str();
}

std::string objective_scale_invariance() {
    Rng rng = derive_stream(kSeed, 2, 0, StreamTag::Profile);
    const auto cfg = small_cfg(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fs = channel::make_random_fully_separable(cfg, rng);
        const auto ps = random_partial(cfg, rng);
        const CMatrix s = gaussian(cfg.tau, cfg.total_users(), rng);
        const auto cf = pilots::make_context(fs, {1.0, 0.4});
        const auto cp = pilots::make_context(ps, {1.0, 0.4});
        const matlin::Complex alpha(-2.5, 1.2);
        const double f0 = pilots::fully_sep_objective(s, cf);
        const double f1 = pilots::fully_sep_objective(alpha * s, cf);
        const double p0 = pilots::partially_sep_objective(s, cp);
        const double p1 = pilots::partially_sep_objective(alpha * s, cp);
        if (std::abs(f0 - f1) > 1e-10 * std::abs(f0) || std::abs(p0 - p1) > 1e-10 * std::abs(p0)) {
            return "objective changed under S -> alpha S";
        }
    }
    return "";
}

std::string magiq_monotone() {
    Rng rng = derive_stream(kSeed, 3, 0, StreamTag::CombinerDictionary);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix x = gaussian(8, 8, rng);
        const CMatrix u = combiner::fully_digital(x * x.adjoint(), 4);
        const auto st = combiner::magiq(u, estimator::FeasibleSet::Unimodular);
        for (std::size_t n = 1; n < st.gap_trace.size(); ++n) {
            if (st.gap_trace[n] > st.gap_trace[n - 1] + 1e-12) return "gap increased";
        }
        const CMatrix tt = st.t.adjoint() * st.t;
        if ((tt - CMatrix::Identity(4, 4)).norm() > 1e-9) return "T lost unitarity";
    }
    return "";
}

std::string weight_upper_bound() {
    Rng rng = derive_stream(kSeed, 4, 0, StreamTag::Profile);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix x = gaussian(6, 6, rng);
        const CMatrix q = x * x.adjoint();
        const auto eig = matlin::herm_eig(q);
        for (int n_rf = 1; n_rf <= 6; ++n_rf) {
            const double bound = eig.values.head(n_rf).sum();
            const double w_rand = combiner::weight(q, gaussian(n_rf, 6, rng));
            const double w_fd = combiner::weight(q, combiner::fully_digital(q, n_rf));
            if (w_rand > bound + 1e-8 * bound) return "random combiner exceeds the eigen-sum";
            if (std::abs(w_fd - bound) > 1e-8 * bound) return "fully-digital misses the eigen-sum";
        }
    }
    return "";
}

std::string projector_idempotence() {
    Rng rng = derive_stream(kSeed, 5, 0, StreamTag::Profile);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = gaussian(6, 1 + trial % 4, rng);
        const CMatrix p = matlin::range_projector(a);
        if ((p * p - p).norm() > 1e-10 || (p * a - a).norm() > 1e-8 * a.norm()) {
            return "projector not idempotent or does not fix its range";
        }
    }
    return "";
}

std::string eigen_pilot_optimality() {
    Rng rng = derive_stream(kSeed, 6, 0, StreamTag::Profile);
    for (int trial = 0; trial < 10; ++trial) {
        channel::NetworkConfig cfg = small_cfg(2);
        const auto fs = channel::make_random_fully_separable(cfg, rng);
        const auto ctx = pilots::make_context(fs, {1.0, 0.6});
        const auto eig = matlin::herm_eig(ctx.weighted_transmit());
        const double bound = eig.values.head(cfg.tau).sum();
        const double opt = pilots::fully_sep_objective(pilots::eigen_pilots(ctx, cfg).stacked(), ctx);
        if (std::abs(opt - bound) > 1e-9 * bound) return "eigen-pilots miss the eigen-sum";
        for (int r = 0; r < 50; ++r) {
            if (pilots::fully_sep_objective(gaussian(cfg.tau, 4, rng), ctx) > opt + 1e-9 * opt) {
                return "random pilots beat eigen-pilots";
            }
        }
    }
    return "";
}

std::string scalar_two_cell_mse() {
    channel::FullySeparable fs;
    fs.q = {CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)};
    fs.p = {CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)};
    const channel::CorrelationProfile prof(std::move(fs));
    estimator::PilotSet s;
    s.cells = {CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)};
    estimator::CombinerSet w;
    w.cells = {CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)};
    const double eps = estimator::analytic_mse(s, w, prof, 0);
    return std::abs(eps - 0.5) < 1e-12 ? "" : "expected 0.5";
}

std::string block_inverse() {
    Rng rng = derive_stream(kSeed, 7, 0, StreamTag::Pilots);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix s = gaussian(3, 6, rng);
        const CMatrix row = gaussian(1, 6, rng);
        CMatrix grown(4, 6);
        grown << s, row;
        const CMatrix q = (s * s.adjoint()).inverse();
        const CMatrix direct = (grown * grown.adjoint()).inverse();
        if (matlin::rel_diff(pilots::rank1_block_inverse(s, row, q), direct) > 1e-9) {
            return "block inverse disagrees with the direct inverse";
        }
    }
    return "";
}

}  // namespace

std::vector<CheckResult> run_all() {
    const std::vector<std::pair<std::string, Check>> checks = {
        {"power feasibility of every pilot designer", power_feasibility},
        {"scale invariance of both pilot objectives", objective_scale_invariance},
        {"MaGiQ gap monotone, T unitary", magiq_monotone},
        {"combiner weight bounded by the eigen-sum", weight_upper_bound},
        {"range projector idempotent", projector_idempotence},
        {"eigen-pilots attain the eigen-sum bound", eigen_pilot_optimality},
        {"two-cell scalar MSE equals 0.5", scalar_two_cell_mse},
        {"rank-one block inverse", block_inverse},
    };
    std::vector<CheckResult> out;
    for (const auto& [name, check] : checks) {
        CheckResult r{name, false, ""};
        try {
            r.detail = check();
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

int summarize(const std::vector<CheckResult>& results, std::ostream& os) {
    std::size_t passed = 0;
    for (const auto& r : results) {
        os << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.passed) os << ": " << r.detail;
        os << '\n';
        if (r.passed) ++passed;
    }
    os << passed << "/" << results.size() << " checks passed\n";
    return passed == results.size() ? 0 : 1;
}

}  // namespace pilotforge::selftest

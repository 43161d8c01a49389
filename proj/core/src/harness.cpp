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

#include "pilotforge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "pilotforge/errors.hpp"
#include "pilotforge/estimator.hpp"
#include "pilotforge/rng.hpp"

namespace pilotforge::harness {

namespace {

using combiner::CombinerMethod;
using pilots::PilotKind;
using pilots::PilotMethod;

bool redrawn_per_trial(const PilotMethod& m) {
    return m.kind == PilotKind::Random || m.kind == PilotKind::Spa;
}

std::uint64_t method_key(const PilotMethod& m) {
    return static_cast<std::uint64_t>(m.kind) * 16 + static_cast<std::uint64_t>(m.dictionary);
}

struct Job {
    int value = 0;
    int combiner = 0;  // index into combiner_methods
    int pilot = 0;     // index into pilot_methods
    int tau = 0;
    int nrf = 0;
};

// Per-trial samples of one (sweep value, method) row.
struct Samples {
    std::vector<double> nmse;
    std::vector<double> analytic;
    std::vector<char> ok;
};

std::string format_g(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::RandomFullySeparable: return "random-fully-separable";
        case ProfileFamily::IdentityRxFullySeparable: return "identity-rx";
        case ProfileFamily::HexMuMimo: return "hex-mu-mimo";
    }
    return "unknown";
}

ProfileFamily profile_family_from_string(const std::string& s) {
    for (auto f : {ProfileFamily::RandomFullySeparable, ProfileFamily::IdentityRxFullySeparable,
                   ProfileFamily::HexMuMimo}) {
        if (to_string(f) == s) return f;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown profile family '" + s + "'");
}

std::string to_string(SweepVariable v) { return v == SweepVariable::Tau ? "tau" : "nrf"; }

SweepVariable sweep_variable_from_string(const std::string& s) {
    if (s == "tau") return SweepVariable::Tau;
    if (s == "nrf") return SweepVariable::Nrf;
    throw Error(ErrorCode::InvalidConfig, "sweep must be 'tau' or 'nrf', got '" + s + "'");
}

channel::NetworkConfig Scenario::config_for(int value) const {
    channel::NetworkConfig c = cfg;
    (sweep == SweepVariable::Tau ? c.tau : c.rf_chains) = value;
    return c;
}

void Scenario::validate() const {
    auto fail = [&](const std::string& what) { throw Error(ErrorCode::InvalidConfig, name + ": " + what); };
    if (trials < 1) fail("trials must be positive");
    if (profile_draws < 0 || profile_draws > trials) fail("profile_draws must lie in [0, trials]");
    if (combiner_methods.empty() || pilot_methods.empty()) fail("need at least one combiner and pilot method");
    if (sweep_values.empty()) fail("empty sweep");
    if (pilot_dictionary < 1 || combiner_dictionary < 1) fail("dictionary sizes must be positive");
    if (profile_kind == ProfileFamily::HexMuMimo &&
        !(cell_radius > 0.0 && path_loss_exponent > 0.0 && shadowing_db >= 0.0)) {
        fail("bad geometry parameters");
    }
    for (int v : sweep_values) {
        const auto c = config_for(v);
        c.validate();
        for (const auto& p : pilot_methods) {
            if ((p.kind == PilotKind::OrthReuse || p.kind == PilotKind::Spa) && c.tau < c.users) {
                fail(pilots::to_string(p) + " needs tau >= K");
            }
            if (p.kind == PilotKind::Eigen && profile_kind == ProfileFamily::HexMuMimo) {
                fail("eigen pilots need a fully-separable profile family");
            }
        }
    }
}

double ResultRow::std_error() const {
    const int n = trials - failed_trials;
    return n > 0 ? std_nmse / std::sqrt(static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
}

std::string method_name(const PilotMethod& p, CombinerMethod c) {
    return pilots::to_string(p) + "/" + combiner::to_string(c);
}

channel::CorrelationProfile draw_profile(const Scenario& s, int index) {
    const auto g = static_cast<std::uint64_t>(index);
    switch (s.profile_kind) {
        case ProfileFamily::RandomFullySeparable: {
            Rng rng = derive_stream(s.seed, g, 0, StreamTag::Profile);
            return channel::make_random_fully_separable(s.cfg, rng);
        }
        case ProfileFamily::IdentityRxFullySeparable: {
            Rng rng = derive_stream(s.seed, g, 0, StreamTag::Profile);
            return channel::make_identity_rx_fully_separable(s.cfg, rng);
        }
        case ProfileFamily::HexMuMimo: {
            Rng geo = derive_stream(s.seed, g, 0, StreamTag::Geometry);
            Rng shad = derive_stream(s.seed, g, 0, StreamTag::Shadowing);
            const auto geom = channel::make_hex_geometry(s.cfg, s.cell_radius, geo);
            return channel::make_mu_mimo_profile(geom, s.cfg.users, s.cfg.antennas, s.path_loss_exponent,
                                                 s.shadowing_db, shad);
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unhandled profile family");
}

int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PILOTFORGE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(n, 1);
}

std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& opts) {
    s.validate();

    // Rows in output order. A full receiver does not depend on N_RF, so an
    // N_RF sweep evaluates it once.
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < s.sweep_values.size(); ++v) {
        const auto cfg = s.config_for(s.sweep_values[v]);
        for (std::size_t c = 0; c < s.combiner_methods.size(); ++c) {
            const bool full = s.combiner_methods[c] == CombinerMethod::FullReceiver;
            if (full && s.sweep == SweepVariable::Nrf && v > 0) continue;
            for (std::size_t p = 0; p < s.pilot_methods.size(); ++p) {
                jobs.push_back({static_cast<int>(v), static_cast<int>(c), static_cast<int>(p), cfg.tau,
                                full ? cfg.antennas : cfg.rf_chains});
            }
        }
    }

    const int groups = s.profile_count();
    const auto trials = static_cast<std::size_t>(s.trials);
    std::vector<Samples> samples(jobs.size());
    for (auto& sm : samples) {
        sm.nmse.assign(trials, 0.0);
        sm.analytic.assign(trials, 0.0);
        sm.ok.assign(trials, 0);
    }

    auto group_begin = [&](int g) {
        return static_cast<int>((static_cast<long long>(g) * s.trials + groups - 1) / groups);
    };

    // One work item per (sweep value, profile group).
    const int values = static_cast<int>(s.sweep_values.size());
    const long long items = static_cast<long long>(values) * groups;
    std::atomic<long long> next{0};
    std::mutex err_mu;
    std::optional<Error> fatal;

    auto work = [&](long long item) {
        const int v = static_cast<int>(item / groups);
        const int g = static_cast<int>(item % groups);
        const auto cfg = s.config_for(s.sweep_values[static_cast<std::size_t>(v)]);
        const auto profile = draw_profile(s, g);
        const channel::ChannelSampler sampler(profile);
        const auto gu = static_cast<std::uint64_t>(g);

        std::vector<std::optional<combiner::CombinerDesign>> designs(s.combiner_methods.size());
        for (std::size_t c = 0; c < s.combiner_methods.size(); ++c) {
            Rng rng = derive_stream(s.seed, gu, static_cast<std::uint64_t>(cfg.rf_chains),
                                    StreamTag::CombinerDictionary);
            try {
                designs[c] = combiner::design_combiners(profile, cfg.rf_chains, s.combiner_methods[c], rng,
                                                        s.combiner_dictionary);
            } catch (const Error&) {
                // every trial of this group fails for this combiner
            }
        }

        struct Slot {
            std::size_t job;
            std::optional<estimator::MmseEstimator> fixed;
            bool design_failed = false;
        };
        std::vector<Slot> slots;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const Job& job = jobs[j];
            if (job.value != v) continue;
            Slot slot{j, std::nullopt, false};
            const auto& design = designs[static_cast<std::size_t>(job.combiner)];
            const auto& pm = s.pilot_methods[static_cast<std::size_t>(job.pilot)];
            if (!design) {
                slot.design_failed = true;
            } else if (!redrawn_per_trial(pm)) {
                try {
                    Rng rng = derive_stream(s.seed, gu, method_key(pm), StreamTag::PilotDictionary);
                    const auto set = pilots::design_pilots(pm, profile, design->weights, cfg, rng,
                                                           s.pilot_dictionary);
                    slot.fixed.emplace(set, design->set, profile, estimator::GramPolicy::RidgeFallback);
                } catch (const Error&) {
                    slot.design_failed = true;
                }
            }
            slots.push_back(std::move(slot));
        }

        const int t_end = group_begin(g + 1);
        for (int t = group_begin(g); t < t_end; ++t) {
            const auto tu = static_cast<std::uint64_t>(t);
            Rng ch_rng = derive_stream(s.seed, tu, 0, StreamTag::Channel);
            const auto real = sampler.sample(ch_rng);
            for (auto& slot : slots) {
                if (slot.design_failed) continue;
                const Job& job = jobs[slot.job];
                const auto& pm = s.pilot_methods[static_cast<std::size_t>(job.pilot)];
                Samples& out = samples[slot.job];
                try {
                    std::optional<estimator::MmseEstimator> per_trial;
                    if (!slot.fixed) {
                        const StreamTag tag = pm.kind == PilotKind::Spa ? StreamTag::SpaBase : StreamTag::Pilots;
                        Rng rng = derive_stream(s.seed, tu, static_cast<std::uint64_t>(cfg.tau), tag);
                        const auto& design = *designs[static_cast<std::size_t>(job.combiner)];
                        const auto set = pilots::design_pilots(pm, profile, design.weights, cfg, rng,
                                                               s.pilot_dictionary);
                        per_trial.emplace(set, design.set, profile, estimator::GramPolicy::RidgeFallback);
                    }
                    const auto& est = slot.fixed ? *slot.fixed : *per_trial;
                    const auto report = est.run(real);
                    const double analytic = est.analytic_nmse();
                    if (!std::isfinite(report.nmse_empirical) || !std::isfinite(analytic)) continue;
                    out.nmse[static_cast<std::size_t>(t)] = report.nmse_empirical;
                    out.analytic[static_cast<std::size_t>(t)] = analytic;
                    out.ok[static_cast<std::size_t>(t)] = 1;
                } catch (const Error&) {
                    // dropped, counted in failed_trials
                }
            }
        }
    };

    auto worker = [&]() {
        for (;;) {
            const long long item = next.fetch_add(1);
            if (item >= items) return;
            try {
                work(item);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!fatal) fatal = e;
                next.store(items);
                return;
            }
        }
    };

    const int n_threads = static_cast<int>(std::min<long long>(worker_count(opts.threads), items));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (fatal) throw *fatal;

    std::vector<ResultRow> rows;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        const Samples& sm = samples[j];
        ResultRow row;
        row.scenario = s.name;
        row.method = method_name(s.pilot_methods[static_cast<std::size_t>(job.pilot)],
                                 s.combiner_methods[static_cast<std::size_t>(job.combiner)]);
        row.tau = job.tau;
        row.nrf = job.nrf;
        row.trials = s.trials;
        row.seed = s.seed;
        double sum = 0.0;
        double sum_analytic = 0.0;
        int n = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            if (!sm.ok[t]) continue;
            sum += sm.nmse[t];
            sum_analytic += sm.analytic[t];
            ++n;
        }
        row.failed_trials = s.trials - n;
        if (n == 0) {
            row.mean_nmse = row.std_nmse = row.mean_analytic_mse = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.mean_nmse = sum / n;
            row.mean_analytic_mse = sum_analytic / n;
            double ss = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                if (sm.ok[t]) ss += (sm.nmse[t] - row.mean_nmse) * (sm.nmse[t] - row.mean_nmse);
            }
            row.std_nmse = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig5", "fig6"}; }

Scenario preset(const std::string& name) {
    Scenario s;
    s.name = name;
    s.cfg.cells = 3;
    s.cfg.users = 4;
    s.cfg.antennas = 10;
    s.cfg.rf_chains = 1;
    s.cfg.tau = 4;
    s.cfg.power = 1.0;
    const PilotMethod eigen{PilotKind::Eigen, pilots::DictionaryKind::Gaussian};
    const PilotMethod random{PilotKind::Random, pilots::DictionaryKind::Gaussian};
    const PilotMethod spa{PilotKind::Spa, pilots::DictionaryKind::Gaussian};
    auto range = [](int lo, int hi) {
        std::vector<int> v;
        for (int x = lo; x <= hi; ++x) v.push_back(x);
        return v;
    };

    if (name == "fig1") {
        s.profile_kind = ProfileFamily::RandomFullySeparable;
        s.combiner_methods = {CombinerMethod::FullyDigital, CombinerMethod::GrtmDict};
        s.pilot_methods = {eigen, random, {PilotKind::OrthReuse, pilots::DictionaryKind::Gaussian}};
        s.sweep_values = range(4, 12);
    } else if (name == "fig2") {
        s.profile_kind = ProfileFamily::IdentityRxFullySeparable;
        s.combiner_methods = {CombinerMethod::FullyDigital};
        s.pilot_methods = {eigen, spa, random};
        s.sweep_values = range(4, 12);
    } else if (name == "fig3") {
        s.profile_kind = ProfileFamily::IdentityRxFullySeparable;
        s.cfg.tau = 5;
        s.combiner_methods = {CombinerMethod::FullyDigital, CombinerMethod::FullReceiver};
        s.pilot_methods = {eigen, spa, random};
        s.sweep = SweepVariable::Nrf;
        s.sweep_values = range(1, 10);
    } else if (name == "fig5" || name == "fig6") {
        s.profile_kind = ProfileFamily::HexMuMimo;
        s.cfg.cells = 7;
        s.cfg.rf_chains = 10;
        s.combiner_methods = {CombinerMethod::FullReceiver};
        if (name == "fig5") {
            s.pilot_methods = {{PilotKind::Gsrtm, pilots::DictionaryKind::Gaussian}, spa, random};
        } else {
            s.pilot_methods = {{PilotKind::Gsrtm, pilots::DictionaryKind::Gaussian},
                               {PilotKind::Gsrtm, pilots::DictionaryKind::Qam4},
                               {PilotKind::Gsrtm, pilots::DictionaryKind::Qam16}};
        }
        s.sweep_values = range(4, 8);
        s.profile_draws = kMuMimoProfileDraws;
    } else {
        throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
    }
    return s;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "scenario,method,tau,nrf,trials,seed,mean_nmse,std_nmse,mean_analytic_mse,failed_trials\n";
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.method << ',' << r.tau << ',' << r.nrf << ',' << r.trials << ',' << r.seed
           << ',' << format_g(r.mean_nmse) << ',' << format_g(r.std_nmse) << ','
           << format_g(r.mean_analytic_mse) << ',' << r.failed_trials << '\n';
    }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    write_csv(rows, os);
    os.flush();
    if (!os) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::vector<ResultRow> parse_csv(std::istream& is) {
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::IoError, "empty CSV");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 10) throw Error(ErrorCode::IoError, "CSV row needs 10 fields: " + line);
        try {
            ResultRow r;
            r.scenario = f[0];
            r.method = f[1];
            r.tau = std::stoi(f[2]);
            r.nrf = std::stoi(f[3]);
            r.trials = std::stoi(f[4]);
            r.seed = std::stoull(f[5]);
            r.mean_nmse = std::stod(f[6]);
            r.std_nmse = std::stod(f[7]);
            r.mean_analytic_mse = std::stod(f[8]);
            r.failed_trials = std::stoi(f[9]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::IoError, "bad CSV row: " + line);
        }
    }
    return rows;
}

Scenario scenario_from_config(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(lineno) + ": expected key = value");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    Scenario s;
    s.name = "custom";
    s.cfg.cells = 3;
    s.cfg.users = 4;
    s.cfg.antennas = 10;
    s.cfg.rf_chains = 1;
    s.cfg.tau = 4;
    s.combiner_methods = {CombinerMethod::FullyDigital};
    s.pilot_methods = {{PilotKind::Eigen, pilots::DictionaryKind::Gaussian}};
    s.sweep_values = {4};
    for (const auto& [k, v] : entries) {
        if (k == "preset") s = preset(v);
    }

    auto to_int = [](const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const long long x = std::stoll(v, &used);
            if (used != v.size() || x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
                throw std::invalid_argument(v);
            }
            return static_cast<int>(x);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig, key + ": expected an integer, got '" + v + "'");
        }
    };
    auto to_double = [](const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig, key + ": expected a number, got '" + v + "'");
        }
    };
    auto list = [](const std::string& v) {
        std::vector<std::string> out;
        for (const auto& item : split(v, ',')) {
            const auto t = trim(item);
            if (!t.empty()) out.push_back(t);
        }
        return out;
    };

    for (const auto& [k, v] : entries) {
        if (k == "preset") continue;
        if (k == "name") s.name = v;
        else if (k == "cells") s.cfg.cells = to_int(k, v);
        else if (k == "users") s.cfg.users = to_int(k, v);
        else if (k == "antennas") s.cfg.antennas = to_int(k, v);
        else if (k == "rf_chains") s.cfg.rf_chains = to_int(k, v);
        else if (k == "tau") s.cfg.tau = to_int(k, v);
        else if (k == "power") s.cfg.power = to_double(k, v);
        else if (k == "profile") s.profile_kind = profile_family_from_string(v);
        else if (k == "sweep") s.sweep = sweep_variable_from_string(v);
        else if (k == "trials") s.trials = to_int(k, v);
        else if (k == "seed") {
            try {
                s.seed = std::stoull(v);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::InvalidConfig, "seed: expected an unsigned integer");
            }
        }
        else if (k == "profile_draws") s.profile_draws = to_int(k, v);
        else if (k == "cell_radius") s.cell_radius = to_double(k, v);
        else if (k == "path_loss_exponent") s.path_loss_exponent = to_double(k, v);
        else if (k == "shadowing_db") s.shadowing_db = to_double(k, v);
        else if (k == "pilot_dictionary") s.pilot_dictionary = to_int(k, v);
        else if (k == "combiner_dictionary") s.combiner_dictionary = to_int(k, v);
        else if (k == "pilots") {
            s.pilot_methods.clear();
            for (const auto& m : list(v)) s.pilot_methods.push_back(pilots::pilot_method_from_string(m));
        } else if (k == "combiners") {
            s.combiner_methods.clear();
            for (const auto& m : list(v)) s.combiner_methods.push_back(combiner::combiner_method_from_string(m));
        } else if (k == "values") {
            s.sweep_values.clear();
            for (const auto& item : list(v)) {
                const auto dots = item.find("..");
                if (dots == std::string::npos) {
                    s.sweep_values.push_back(to_int(k, item));
                } else {
                    const int lo = to_int(k, item.substr(0, dots));
                    const int hi = to_int(k, item.substr(dots + 2));
                    if (hi < lo) throw Error(ErrorCode::InvalidConfig, "values: empty range " + item);
                    for (int x = lo; x <= hi; ++x) s.sweep_values.push_back(x);
                }
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
        }
    }
    const bool draws_given = std::any_of(entries.begin(), entries.end(),
                                         [](const auto& e) { return e.first == "profile_draws"; });
    if (!draws_given && s.profile_draws > s.trials) s.profile_draws = s.trials;
    s.validate();
    return s;
}

Scenario load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
    return scenario_from_config(is);
}

}  // namespace pilotforge::harness

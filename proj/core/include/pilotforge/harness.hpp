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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pilotforge/channel.hpp"
#include "pilotforge/combiner.hpp"
#include "pilotforge/pilots.hpp"

namespace pilotforge::harness {

enum class ProfileFamily {
    RandomFullySeparable,      // Q_i = X_i X_i^*, P_j diagonal U[0,1]
    IdentityRxFullySeparable,  // Q_i = I, P_j diagonal U[0,1]
    HexMuMimo,                 // hexagonal layout, path loss and shadowing
};

std::string to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(const std::string& s);

enum class SweepVariable { Tau, Nrf };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

/// Profile draws used by the MU-MIMO presets; each draw is shared by
/// trials / kMuMimoProfileDraws channel realizations.
inline constexpr int kMuMimoProfileDraws = 50;

struct Scenario {
    std::string name;
    channel::NetworkConfig cfg;
    ProfileFamily profile_kind = ProfileFamily::RandomFullySeparable;
    std::vector<combiner::CombinerMethod> combiner_methods;
    std::vector<pilots::PilotMethod> pilot_methods;
    SweepVariable sweep = SweepVariable::Tau;
    std::vector<int> sweep_values;
    int trials = 2000;
    std::uint64_t seed = 1;
    /// Number of independent profile draws. 0 draws a fresh profile for
    /// every trial; otherwise trials are split evenly over the draws.
    int profile_draws = 0;
    double cell_radius = 1.0;
    double path_loss_exponent = 3.0;
    double shadowing_db = 8.0;
    int pilot_dictionary = pilots::kDefaultPilotDictionary;
    int combiner_dictionary = combiner::kDefaultCombinerDictionary;

    /// cfg with the swept variable set to value.
    channel::NetworkConfig config_for(int value) const;
    int profile_count() const { return profile_draws == 0 ? trials : profile_draws; }
    /// Throws InvalidConfig.
    void validate() const;
};

struct ResultRow {
    std::string scenario;
    std::string method;  // "<pilots>/<combiner>"
    int tau = 0;
    int nrf = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double mean_nmse = 0.0;
    double std_nmse = 0.0;
    double mean_analytic_mse = 0.0;
    int failed_trials = 0;

    /// Standard error of mean_nmse over the successful trials.
    double std_error() const;
};

struct RunOptions {
    int threads = 0;  // 0: hardware concurrency, capped by PILOTFORGE_THREADS
};

std::string method_name(const pilots::PilotMethod& p, combiner::CombinerMethod c);

/// The profile used by trials of group `index`.
channel::CorrelationProfile draw_profile(const Scenario& s, int index);

std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& opts = {});

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv(std::istream& is);

/// Scenario from `key = value` lines; '#' starts a comment.
Scenario scenario_from_config(std::istream& is);
Scenario load_config(const std::string& path);

int worker_count(int requested);

}  // namespace pilotforge::harness

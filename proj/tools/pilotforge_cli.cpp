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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pilotforge/errors.hpp"
#include "pilotforge/harness.hpp"
#include "pilotforge/selftest.hpp"

namespace pf = pilotforge;

namespace {

int run_command(const std::string& preset_name, const std::string& config_path, std::optional<int> trials,
                std::optional<std::uint64_t> seed, const std::string& out, int threads) {
    pf::harness::Scenario s =
        config_path.empty() ? pf::harness::preset(preset_name) : pf::harness::load_config(config_path);
    if (trials) s.trials = *trials;
    if (seed) s.seed = *seed;
    if (s.profile_draws > s.trials) s.profile_draws = s.trials;
    for (const auto& w : s.cfg.warnings()) std::cerr << "warning: " << w << '\n';

    const auto rows = pf::harness::run_scenario(s, {threads});
    if (out.empty() || out == "-") {
        pf::harness::write_csv(rows, std::cout);
    } else {
        pf::harness::emit_csv(rows, out);
    }
    return 0;
}

int selftest_command() { return pf::selftest::summarize(pf::selftest::run_all(), std::cout); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pilotforge: pilot and analog combiner design experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a Monte-Carlo scenario and write CSV");
    std::string preset_name;
    std::string config_path;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
    auto* preset_opt = run->add_option("--preset", preset_name, "Preset name (see list-presets)");
    auto* config_opt = run->add_option("--config", config_path, "Scenario file with key = value lines")
                           ->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run->add_option("--trials", trials, "Monte-Carlo trials per sweep value")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--out", out, "CSV output path (default: stdout)");
    run->add_option("--threads", threads, "Worker threads (0: all cores, capped by PILOTFORGE_THREADS)")
        ->check(CLI::NonNegativeNumber);

    app.add_subcommand("list-presets", "Print the available preset names");
    app.add_subcommand("selftest", "Run the small-instance oracle suite");

    try {
        app.parse(argc, argv);
        if (run->parsed() && preset_opt->count() + config_opt->count() != 1) {
            throw CLI::RequiredError("run needs exactly one of --preset or --config");
        }
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (run->parsed()) {
            return run_command(preset_name, config_path, trials, seed, out, threads);
        }
        if (app.got_subcommand("list-presets")) {
            for (const auto& name : pf::harness::preset_names()) std::cout << name << '\n';
            return 0;
        }
        return selftest_command();
    } catch (const pf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.code() == pf::ErrorCode::UnknownPreset || e.code() == pf::ErrorCode::InvalidConfig) return 2;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

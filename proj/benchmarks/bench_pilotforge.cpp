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

#include <benchmark/benchmark.h>

#include "pilotforge/channel.hpp"
#include "pilotforge/combiner.hpp"
#include "pilotforge/estimator.hpp"
#include "pilotforge/harness.hpp"
#include "pilotforge/pilots.hpp"

namespace pf = pilotforge;

namespace {

pf::channel::NetworkConfig fig1_config(int tau) {
    auto cfg = pf::harness::preset("fig1").cfg;
    cfg.tau = tau;
    return cfg;
}

pf::channel::CorrelationProfile fig1_profile() { return pf::harness::draw_profile(pf::harness::preset("fig1"), 0); }

pf::channel::CorrelationProfile fig5_profile() { return pf::harness::draw_profile(pf::harness::preset("fig5"), 0); }

void BM_ChannelSample(benchmark::State& state) {
    const auto prof = fig1_profile();
    const pf::channel::ChannelSampler sampler(prof);
    pf::Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_ChannelSample);

void BM_EstimatorBuild(benchmark::State& state) {
    const auto cfg = fig1_config(static_cast<int>(state.range(0)));
    const auto prof = fig1_profile();
    pf::Rng rng(2);
    const auto comb = pf::combiner::design_combiners(prof, 1, pf::combiner::CombinerMethod::FullyDigital, rng);
    const auto pilots = pf::pilots::baseline_random(cfg, rng);
    for (auto _ : state) {
        pf::estimator::MmseEstimator est(pilots, comb.set, prof, pf::estimator::GramPolicy::RidgeFallback);
        benchmark::DoNotOptimize(est.sum_mse());
    }
}
BENCHMARK(BM_EstimatorBuild)->Arg(4)->Arg(12);

void BM_EstimatorRun(benchmark::State& state) {
    const auto cfg = fig1_config(8);
    const auto prof = fig1_profile();
    pf::Rng rng(3);
    const auto comb = pf::combiner::design_combiners(prof, 1, pf::combiner::CombinerMethod::FullyDigital, rng);
    const pf::estimator::MmseEstimator est(pf::pilots::baseline_random(cfg, rng), comb.set, prof);
    const auto real = pf::channel::ChannelSampler(prof).sample(rng);
    for (auto _ : state) benchmark::DoNotOptimize(est.run(real));
}
BENCHMARK(BM_EstimatorRun);

void BM_GrtmCombiner(benchmark::State& state) {
    const auto prof = fig1_profile();
    pf::Rng rng(4);
    const auto dict = pf::combiner::unimodular_dictionary(300, prof.antennas(), rng);
    const auto q = prof.q(0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(pf::combiner::grtm_combiner(q, static_cast<int>(state.range(0)), dict));
}
BENCHMARK(BM_GrtmCombiner)->Arg(1)->Arg(4);

void BM_EigenPilots(benchmark::State& state) {
    const auto cfg = fig1_config(8);
    const auto prof = fig1_profile();
    const auto ctx = pf::pilots::make_context(prof, std::vector<double>(3, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(pf::pilots::eigen_pilots(ctx, cfg));
}
BENCHMARK(BM_EigenPilots);

void BM_Gsrtm(benchmark::State& state) {
    auto cfg = pf::harness::preset("fig5").cfg;
    cfg.tau = static_cast<int>(state.range(0));
    const auto prof = fig5_profile();
    const auto ctx = pf::pilots::make_context(prof, std::vector<double>(7, 10.0));
    pf::Rng rng(5);
    const auto dict = pf::pilots::pilot_dictionary(pf::pilots::DictionaryKind::Gaussian, 300, 28, rng);
    for (auto _ : state) benchmark::DoNotOptimize(pf::pilots::gsrtm(ctx, cfg, dict));
}
BENCHMARK(BM_Gsrtm)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Spa(benchmark::State& state) {
    const auto cfg = pf::harness::preset("fig5").cfg;
    const auto prof = fig5_profile();
    pf::Rng rng(6);
    const auto base = pf::pilots::spa_base_sequences(cfg, rng);
    for (auto _ : state) benchmark::DoNotOptimize(pf::pilots::baseline_spa(prof, cfg, base));
}
BENCHMARK(BM_Spa);

}  // namespace

BENCHMARK_MAIN();

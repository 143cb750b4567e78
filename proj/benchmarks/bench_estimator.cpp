// SPDX-License-Identifier: Apache-2.0
#include "isacest/bounds.hpp"
#include "isacest/estimator.hpp"
#include "isacest/harness.hpp"

#include <benchmark/benchmark.h>

using namespace isacest;

namespace {

TrialRealization default_trial(double snr_db) {
    return make_trial(CampaignConfig{}, 0, snr_db);
}

void BM_SpreadingFunction(benchmark::State& state) {
    const auto t = default_trial(10.0);
    for (auto _ : state) benchmark::DoNotOptimize(spreading_function(t.obs, 0.37, 0.11));
}
BENCHMARK(BM_SpreadingFunction);

void BM_CoarseSearch(benchmark::State& state) {
    const auto t = default_trial(10.0);
    EstimatorConfig cfg;
    cfg.coarse_oversampling = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(coarse_search(t.obs, t.obs.y, cfg));
}
BENCHMARK(BM_CoarseSearch)->Arg(1)->Arg(4)->Arg(8);

void BM_EstimateThreePaths(benchmark::State& state) {
    const auto t = default_trial(20.0);
    const EstimatorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate(t.obs, cfg));
}
BENCHMARK(BM_EstimateThreePaths)->Unit(benchmark::kMillisecond);

void BM_FisherInformation(benchmark::State& state) {
    const auto t = default_trial(20.0);
    const auto axes = SamplingAxes::for_grid(t.frame.mask.n_subcarriers(), t.frame.mask.n_symbols());
    for (auto _ : state) benchmark::DoNotOptimize(crb(t.truth, t.obs.x_hat, t.frame.mask, axes, t.obs.noise_var));
}
BENCHMARK(BM_FisherInformation);

}  // namespace

BENCHMARK_MAIN();

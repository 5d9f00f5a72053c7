#include <benchmark/benchmark.h>

#include <iml/solver.hpp>

#include "bench_common.hpp"

static void BM_FitIml(benchmark::State& state) {
    const auto train = bench::gaussian_data(static_cast<std::size_t>(state.range(0)), 8, 0.1);
    const iml::HyperParams hp{.margin = 1.0, .lambda = 0.01, .tradeoff = 0.5};
    for (auto _ : state) {
        auto fit = iml::fit_iml_detailed(train, hp);
        benchmark::DoNotOptimize(fit.L);
    }
}
BENCHMARK(BM_FitIml)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_FitUnweightedRandomPairs(benchmark::State& state) {
    const auto train = bench::gaussian_data(static_cast<std::size_t>(state.range(0)), 8, 0.1);
    const iml::HyperParams hp{.margin = 1.0,
                              .lambda = 0.01,
                              .tradeoff = 0.5,
                              .weighting = iml::Weighting::unweighted,
                              .pair_strategy = iml::PairStrategy::random};
    for (auto _ : state) {
        auto fit = iml::fit_iml_detailed(train, hp, {}, 3);
        benchmark::DoNotOptimize(fit.L);
    }
}
BENCHMARK(BM_FitUnweightedRandomPairs)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include <iml/objective.hpp>
#include <iml/pairs.hpp>

#include "bench_common.hpp"

static void BM_PairObjectiveGradient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto train = bench::gaussian_data(n, d, 0.2);
    const iml::HyperParams hp{.margin = 1.0, .lambda = 0.1};
    const auto pairs = iml::build_pairs_knn(train, hp.k);
    const iml::PairObjective objective(train, pairs, hp);

    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) * 0.8;
    Eigen::MatrixXd grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(objective.value_and_gradient(L, grad));
        benchmark::DoNotOptimize(grad.data());
    }
    state.counters["pairs"] = static_cast<double>(objective.pair_count());
}
BENCHMARK(BM_PairObjectiveGradient)->Args({200, 4})->Args({1000, 10})->Args({1000, 40});

static void BM_BuildKnnPairs(benchmark::State& state) {
    const auto train = bench::gaussian_data(static_cast<std::size_t>(state.range(0)), 10, 0.1);
    for (auto _ : state) {
        auto pairs = iml::build_pairs_knn(train, 3);
        benchmark::DoNotOptimize(pairs);
    }
}
BENCHMARK(BM_BuildKnnPairs)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include <iml/knn.hpp>

#include "bench_common.hpp"

static void BM_KnnPredict(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto train = bench::gaussian_data(n, 10, 0.3, 1);
    const auto test = bench::gaussian_data(n / 2, 10, 0.3, 2);
    const auto L = iml::ProjectionMatrix::identity(10);
    const auto model = iml::KnnModel::fit(L, train, 3);
    for (auto _ : state) {
        auto predicted = iml::knn_predict(model, L, test.features());
        benchmark::DoNotOptimize(predicted);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(test.size()));
}
BENCHMARK(BM_KnnPredict)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

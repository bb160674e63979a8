#include <benchmark/benchmark.h>

#include "sws/models/nn.hpp"
#include "sws/stats.hpp"

static void BM_ReferencePValue(benchmark::State& state) {
    sws::models::Rng rng(7);
    std::vector<double> refs(static_cast<std::size_t>(state.range(0)));
    for (auto& v : refs) v = -30.0 * rng.next_double();
    for (auto _ : state)
        benchmark::DoNotOptimize(sws::stats::reference_pvalue(-15.0, refs));
}
BENCHMARK(BM_ReferencePValue)->Arg(3)->Arg(1000);

static void BM_Spearman(benchmark::State& state) {
    sws::models::Rng rng(11);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.next_double();
        b[i] = rng.next_double();
    }
    for (auto _ : state) benchmark::DoNotOptimize(sws::stats::spearman(a, b));
}
BENCHMARK(BM_Spearman)->Arg(100)->Arg(10000);

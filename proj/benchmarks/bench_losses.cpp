#include <benchmark/benchmark.h>

#include "sws/losses.hpp"
#include "sws/models/nn.hpp"

using namespace sws::losses;

namespace {

LossBatch random_batch(std::size_t k, std::uint64_t seed, bool with_ref) {
    sws::models::Rng rng(seed);
    LossBatch batch;
    batch.logits.resize(k);
    batch.scores.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        batch.logits[i] = 4.0 * rng.next_double() - 2.0;
        batch.scores[i] = -static_cast<double>(i) - rng.next_double();
    }
    batch.original_score = -1.5;
    if (with_ref) {
        std::vector<double> ref(k);
        for (auto& v : ref) v = 4.0 * rng.next_double() - 2.0;
        batch.ref_logits = std::move(ref);
    }
    return batch;
}

}  // namespace

static void BM_MarginRanking(benchmark::State& state) {
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 1, false);
    for (auto _ : state) benchmark::DoNotOptimize(margin_ranking_loss(batch));
}
BENCHMARK(BM_MarginRanking)->Arg(5)->Arg(20)->Arg(100);

static void BM_CombinedMrAs(benchmark::State& state) {
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 2, false);
    for (auto _ : state)
        benchmark::DoNotOptimize(combined_loss(batch, CombineMode::MR_AS));
}
BENCHMARK(BM_CombinedMrAs)->Arg(5)->Arg(20)->Arg(100);

static void BM_DpoPlackettLuce(benchmark::State& state) {
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 3, true);
    for (auto _ : state)
        benchmark::DoNotOptimize(dpo_pl_loss(batch.logits, *batch.ref_logits, 1.0));
}
BENCHMARK(BM_DpoPlackettLuce)->Arg(5)->Arg(20)->Arg(100);

static void BM_SigmaDpoStar(benchmark::State& state) {
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 4, true);
    for (auto _ : state) benchmark::DoNotOptimize(sigma_dpo_star_loss(batch));
}
BENCHMARK(BM_SigmaDpoStar)->Arg(5)->Arg(100);

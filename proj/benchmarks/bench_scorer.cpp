#include <benchmark/benchmark.h>

#include "sws/scorer.hpp"
#include "sws/synth.hpp"

namespace {

struct ScorerFixture {
    std::shared_ptr<sws::models::TinySeq2Seq> model;
    sws::Sentence original, modified;

    ScorerFixture() {
        sws::synth::SynthOptions options;
        options.n_sentences = 50;
        options.pairs_per_sentence = 1;
        const auto corpus = sws::synth::generate(options);
        model = std::make_shared<sws::models::TinySeq2Seq>(
            sws::models::Vocab::build(corpus.sentences), sws::models::Seq2SeqConfig{}, 3);
        original = sws::tokenize(corpus.sentences[0]);
        modified = sws::tokenize(corpus.sentences[1]);
    }

    sws::Scorer make(std::shared_ptr<sws::ScoreCache> cache = nullptr) const {
        sws::ScorerConfig config;
        config.model_id = "bench";
        return sws::Scorer(std::make_shared<sws::Seq2SeqScoreBackend>(model), config,
                           std::move(cache));
    }
};

const ScorerFixture& fixture() {
    static ScorerFixture f;
    return f;
}

}  // namespace

static void BM_ScoreUncached(benchmark::State& state) {
    const auto scorer = fixture().make();
    for (auto _ : state)
        benchmark::DoNotOptimize(scorer.score(fixture().original, fixture().modified));
}
BENCHMARK(BM_ScoreUncached);

static void BM_ScoreCached(benchmark::State& state) {
    const auto scorer = fixture().make(std::make_shared<sws::ScoreCache>());
    benchmark::DoNotOptimize(scorer.score(fixture().original, fixture().modified));
    for (auto _ : state)
        benchmark::DoNotOptimize(scorer.score(fixture().original, fixture().modified));
}
BENCHMARK(BM_ScoreCached);

static void BM_CacheStoreLookup(benchmark::State& state) {
    sws::ScoreCache cache;
    std::size_t i = 0;
    for (auto _ : state) {
        const auto key = std::to_string(i++);
        cache.store("s", key, key, -1.0);
        benchmark::DoNotOptimize(cache.lookup("s", key, key));
    }
}
BENCHMARK(BM_CacheStoreLookup);

BENCHMARK_MAIN();

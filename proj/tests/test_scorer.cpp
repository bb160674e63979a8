#include <doctest.h>
#include <filesystem>
#include <fstream>

#include "sws/error.hpp"
#include "sws/scorer.hpp"
#include "sws/synth.hpp"

using namespace sws;

namespace {

struct Fixture {
    std::shared_ptr<models::TinySeq2Seq> model;
    Sentence original;
    Sentence modified;

    Fixture() {
        synth::SynthOptions options;
        options.n_sentences = 40;
        options.pairs_per_sentence = 2;
        const auto corpus = synth::generate(options);
        auto vocab = models::Vocab::build(corpus.sentences);
        model = std::make_shared<models::TinySeq2Seq>(
            vocab, models::Seq2SeqConfig{.embed_dim = 12, .hidden_dim = 24, .max_positions = 64},
            5);
        models::PretrainOptions popt;
        popt.epochs = 2;
        popt.learning_rate = 0.01;
        model->pretrain(corpus.paraphrase_pairs, popt);

        original = tokenize(corpus.sentences[0]);
        modified = tokenize(corpus.sentences[1]);
    }

    Scorer scorer(Aggregation agg = Aggregation::SUM,
                  std::shared_ptr<ScoreCache> cache = nullptr) const {
        ScorerConfig config;
        config.backend = ScorerBackend::SEQ2SEQ_LL;
        config.model_id = "tiny-s2s";
        config.aggregation = agg;
        return Scorer(std::make_shared<Seq2SeqScoreBackend>(model), config, std::move(cache));
    }
};

}  // namespace

TEST_CASE("score is deterministic and non-positive") {
    Fixture f;
    const auto scorer = f.scorer();
    const double self = scorer.score(f.original, f.original);
    CHECK(self == scorer.score(f.original, f.original));
    CHECK(self <= 0.0);
    CHECK(scorer.score(f.original, f.modified) <= 0.0);
}

TEST_CASE("score matches a stepwise per-token oracle") {
    Fixture f;
    const auto scorer = f.scorer();
    const double full = scorer.score(f.original, f.modified);

    const auto& vocab = f.model->vocab();
    const auto src = vocab.ids(f.original);
    const auto tgt = vocab.ids(f.modified);
    double oracle = 0.0;
    for (std::size_t n = 0; n < tgt.size(); ++n) {
        const int prev = n == 0 ? models::Vocab::kBos : tgt[n - 1];
        oracle += f.model->step_log_probs(src, prev, n)[tgt[n]];
    }
    CHECK(std::fabs(full - oracle) < 1e-5);
}

TEST_CASE("mean aggregation divides by target length") {
    Fixture f;
    const double sum = f.scorer(Aggregation::SUM).score(f.original, f.modified);
    const double mean = f.scorer(Aggregation::MEAN).score(f.original, f.modified);
    CHECK(mean == doctest::Approx(sum / static_cast<double>(f.modified.size())).epsilon(1e-12));
}

TEST_CASE("batch scoring equals sequential scoring bitwise") {
    Fixture f;
    const auto scorer = f.scorer();
    std::vector<Sentence> batch{f.modified, f.original, f.original, f.modified};
    const auto results = scorer.score_batch(f.original, batch);
    REQUIRE(results.size() == 4);
    for (std::size_t i = 0; i < batch.size(); ++i)
        CHECK(results[i] == scorer.score(f.original, batch[i]));
    CHECK(results[1] == results[2]);  // identical inputs, identical values
    CHECK_THROWS_AS(scorer.score_batch(f.original, {}), Error);
}

TEST_CASE("cache transparency") {
    Fixture f;
    const double bare = f.scorer().score(f.original, f.modified);
    auto cache = std::make_shared<ScoreCache>();
    const auto cached_scorer = f.scorer(Aggregation::SUM, cache);
    const double first = cached_scorer.score(f.original, f.modified);
    const double second = cached_scorer.score(f.original, f.modified);
    CHECK(first == bare);
    CHECK(second == bare);
    CHECK(cache->hits() >= 1);
}

TEST_CASE("cache round trip and persistence") {
    const auto path = std::filesystem::temp_directory_path() / "sws_cache_test.jsonl";
    std::filesystem::remove(path);
    {
        ScoreCache cache(path);
        CHECK_FALSE(cache.lookup("s", "a", "b").has_value());
        cache.store("s", "a", "b", -12.5);
        const auto hit = cache.lookup("s", "a", "b");
        REQUIRE(hit.has_value());
        CHECK(*hit == -12.5);
    }
    {
        // reopen: the stored record must survive
        ScoreCache cache(path);
        const auto hit = cache.lookup("s", "a", "b");
        REQUIRE(hit.has_value());
        CHECK(*hit == -12.5);
    }
    std::filesystem::remove(path);
}

TEST_CASE("cache keys are exact byte strings") {
    ScoreCache cache;
    cache.store("s", "ab", "c", -1.0);
    CHECK_FALSE(cache.lookup("s", "a", "bc").has_value());
    CHECK(cache.lookup("s", "ab", "c").has_value());
    // duplicate store resolves to the last value
    cache.store("s", "ab", "c", -2.0);
    CHECK(*cache.lookup("s", "ab", "c") == -2.0);
}

TEST_CASE("scorer ids separate aggregation modes") {
    Fixture f;
    CHECK(f.scorer(Aggregation::SUM).scorer_id() != f.scorer(Aggregation::MEAN).scorer_id());
}

TEST_CASE("config validation") {
    ScorerConfig config;
    config.backend = ScorerBackend::CAUSAL_LM_PROMPTED;
    CHECK_THROWS_AS(config.validate(), Error);  // missing template
    config.prompt_template = std::string(kGptScoreParaphraseTemplate);
    CHECK_NOTHROW(config.validate());
    config.backend = ScorerBackend::SEQ2SEQ_LL;
    CHECK_THROWS_AS(config.validate(), Error);  // template on seq2seq
}

TEST_CASE("gptscore paraphrase scores the modified region only") {
    synth::SynthOptions options;
    options.n_sentences = 40;
    const auto corpus = synth::generate(options);
    auto vocab = models::Vocab::build(corpus.sentences);
    auto model = std::make_shared<models::TinyCausalLM>(
        vocab, models::CausalLmConfig{.embed_dim = 12, .hidden_dim = 24, .max_positions = 256}, 3);
    models::PretrainOptions popt;
    popt.epochs = 2;
    model->pretrain(corpus.sentences, popt);

    ScorerConfig config;
    config.backend = ScorerBackend::CAUSAL_LM_PROMPTED;
    config.model_id = "tiny-clm";
    config.prompt_template = std::string(kGptScoreParaphraseTemplate);
    Scorer scorer(std::make_shared<CausalPromptedScoreBackend>(model, *config.prompt_template),
                  config);

    const auto original = tokenize(corpus.sentences[0]);
    const auto modified = tokenize(corpus.sentences[2]);

    const double value = scorer.gptscore_paraphrase(original, modified);
    CHECK(value <= 0.0);
    CHECK(value == scorer.gptscore_paraphrase(original, modified));  // deterministic

    // oracle: walk the filled prompt stepwise and sum only the modified span
    const std::string filled =
        fill_prompt_template(kGptScoreParaphraseTemplate, original.text, modified.text);
    const auto all_ids = vocab.ids(tokenize(filled));
    const auto modified_ids = vocab.ids(modified);
    const std::size_t start = all_ids.size() - modified_ids.size();
    double oracle = 0.0;
    for (std::size_t n = start; n < all_ids.size(); ++n) {
        const int prev1 = all_ids[n - 1];
        const int prev2 = n >= 2 ? all_ids[n - 2] : models::Vocab::kBos;
        oracle += model->step_log_probs(prev2, prev1)[all_ids[n]];
    }
    CHECK(std::fabs(value - oracle) < 1e-5);

    // wrong backend refuses the call
    Fixture f;
    CHECK_THROWS_AS(f.scorer().gptscore_paraphrase(original, modified), Error);
}

TEST_CASE("empty sentences are rejected") {
    Fixture f;
    Sentence empty;
    CHECK_THROWS_AS(f.scorer().score(empty, f.modified), Error);
}

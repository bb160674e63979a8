// Acceptance suite: one line per criterion, nonzero exit when any fails.
//
// Covers loss exactness, gradient checks against finite differences, the
// preference-loss identities, the reference p-value oracle, the substitution
// rule, stratification counts, the metric oracles, the scorer contract, the
// scaled-down training direction runs, and the prompt golden files.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "sws/candidates.hpp"
#include "sws/error.hpp"
#include "sws/eval.hpp"
#include "sws/llm.hpp"
#include "sws/losses.hpp"
#include "sws/metrics.hpp"
#include "sws/models/masked_lm.hpp"
#include "sws/models/nn.hpp"
#include "sws/models/seq2seq.hpp"
#include "sws/scorer.hpp"
#include "sws/stats.hpp"
#include "sws/subst.hpp"
#include "sws/synth.hpp"
#include "sws/train.hpp"

using namespace sws;
namespace L = sws::losses;

namespace {

int g_failures = 0;

class Check {
  public:
    Check(int id, std::string name) : id_(id), name_(std::move(name)) {}

    void expect(bool condition, const std::string& detail) {
        if (!condition && failure_.empty()) failure_ = detail;
        ok_ = ok_ && condition;
    }

    void note(const std::string& text) { note_ = text; }

    void finish(double seconds = -1.0) {
        std::printf("criterion %2d [%s]: %s", id_, name_.c_str(), ok_ ? "PASS" : "FAIL");
        if (!ok_ && !failure_.empty()) std::printf(" (%s)", failure_.c_str());
        if (ok_ && !note_.empty()) std::printf(" (%s)", note_.c_str());
        if (seconds >= 0.0) std::printf("  [%.2fs]", seconds);
        std::printf("\n");
        std::fflush(stdout);
        if (!ok_) ++g_failures;
    }

  private:
    int id_;
    std::string name_;
    bool ok_ = true;
    std::string failure_;
    std::string note_;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

L::LossBatch batch_of(std::vector<double> logits, std::vector<double> scores,
                      double lambda = 0.5, double gamma = 1.0) {
    L::LossBatch b;
    b.logits = std::move(logits);
    b.scores = std::move(scores);
    b.margin_unit = lambda;
    b.mix_weight = gamma;
    return b;
}

// ---------------------------------------------------------------------------

void criterion_1_loss_exactness() {
    Check check(1, "loss exactness");
    const auto t0 = now_seconds();
    const double tol = 1e-9;

    check.expect(near(L::margin_ranking_loss(batch_of({3, 2, 1}, {-1, -2, -3})).value, 0.0, tol),
                 "MR ordered");
    check.expect(near(L::margin_ranking_loss(batch_of({1, 2}, {-1, -2})).value, 1.5, tol),
                 "MR pair");
    check.expect(near(L::margin_ranking_loss(batch_of({0, 0, 0}, {-1, -2, -3})).value, 2.0, tol),
                 "MR flat");

    check.expect(near(L::avg_score_loss(batch_of({0.3}, {-4.2})).value, 4.2, tol), "AS singleton");
    check.expect(near(L::avg_score_loss(batch_of({0, 0}, {-2, -4})).value, 3.0, tol), "AS flat");
    check.expect(near(L::avg_score_loss(batch_of({std::log(3.0), 0}, {-2, -4})).value, 2.5, tol),
                 "AS weighted");

    {
        auto b = batch_of({0, 0}, {-2, -4});
        b.original_score = -3.0;
        check.expect(near(L::best_score_loss(b).value, 0.0, tol), "BS inactive");
        auto s = batch_of({1.7}, {-5});
        s.original_score = -3.0;
        check.expect(near(L::best_score_loss(s).value, 2.0, tol), "BS singleton");
        auto p = batch_of({0, 0}, {-4, -6});
        p.original_score = -3.0;
        check.expect(near(L::best_score_loss(p).value, 0.5, tol), "BS pair");
    }
    {
        auto b = batch_of({1, 2}, {-2, -4}, 0.5, 0.0);
        const auto mr = L::margin_ranking_loss(b);
        check.expect(L::combined_loss(b, L::CombineMode::MR_AS).value == mr.value,
                     "MR+AS gamma=0 bitwise");
        b.mix_weight = 1.0;
        const double e = std::exp(1.0);
        const double expected = 1.5 + (e / (1 + e) * 4.0 + 1.0 / (1 + e) * 2.0);
        check.expect(near(L::combined_loss(b, L::CombineMode::MR_AS).value, expected, tol),
                     "MR+AS mixed");
        auto c = batch_of({1, 2}, {-2, -4});
        c.original_score = -2.5;  // hinge inactive
        check.expect(near(L::combined_loss(c, L::CombineMode::MR_BS).value,
                          L::margin_ranking_loss(c).value, tol),
                     "MR+BS inactive hinge");
    }
    {
        check.expect(near(L::dpo_pl_loss(std::vector<double>{0.4}, std::vector<double>{0.1},
                                         1.0).value,
                          0.0, tol),
                     "PL K=1");
        check.expect(near(L::dpo_pl_loss(std::vector<double>{1, 1, 1},
                                         std::vector<double>{0, 0, 0}, 1.0).value,
                          std::log(6.0), tol),
                     "PL equal rewards");
        const double e = std::exp(1.0);
        check.expect(near(L::dpo_pl_loss(std::vector<double>{1, 0}, std::vector<double>{0, 0},
                                         1.0).value,
                          -std::log(e / (e + 1.0)), tol),
                     "PL pair");
    }
    {
        auto b = batch_of({1.0, 0.5}, {-1, -2});
        b.ref_logits = b.logits;
        check.expect(L::dpo_star_loss(b).value == 0.0, "DPO* at init");
        auto c = batch_of({2, 1}, {-1, -2});
        c.ref_logits = std::vector<double>{0.0, 0.0};
        check.expect(near(L::dpo_star_loss(c).value, -1.0, tol), "DPO* pair");
        auto d = batch_of({0, 0, 0}, {-1, -2, -3});
        d.ref_logits = std::vector<double>{3.0, 2.0, 1.0};
        check.expect(near(L::dpo_star_loss(d).value, 2.0, tol), "DPO* triple");
    }
    {
        auto b = batch_of({0.5, 0.4, 0.3, 0.2, 0.1}, {-1, -2, -3, -4, -5});
        b.ref_logits = b.logits;
        check.expect(near(L::sigma_dpo_star_loss(b).value, 4.0 * std::log(2.0), tol),
                     "sigmaDPO* at init");
        auto c = batch_of({2, 1}, {-1, -2});
        c.ref_logits = std::vector<double>{0.0, 0.0};
        check.expect(near(L::sigma_dpo_star_loss(c).value, -L::log_sigmoid(1.0), tol),
                     "sigmaDPO* pair");
        auto wide = batch_of({1000.0, 0.0}, {-1, -2});
        wide.ref_logits = std::vector<double>{0.0, 0.0};
        check.expect(near(L::sigma_dpo_star_loss(wide).value, 0.0, tol), "sigmaDPO* saturation");
    }
    {
        check.expect(near(L::cross_entropy_best(std::vector<double>{0, 0}, 0).value,
                          std::log(2.0), tol),
                     "CE uniform");
        check.expect(L::cross_entropy_best(std::vector<double>{100, 0}, 0).value < tol,
                     "CE saturated");
        check.expect(near(L::cross_entropy_best(std::vector<double>{1, 0}, 1).value,
                          std::log(1.0 + std::exp(1.0)), tol),
                     "CE swapped");
    }

    const double elapsed = now_seconds() - t0;
    check.expect(elapsed < 1.0, "runtime exceeded 1s");
    check.finish(elapsed);
}

void criterion_2_gradients() {
    Check check(2, "gradient correctness");
    const auto t0 = now_seconds();
    models::Rng rng(0x67726164);
    const double h = 1e-5;
    const double tol = 1e-4;

    const auto fd_check = [&](const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& grad, std::vector<double> x,
                              const char* name) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto hi = x, lo = x;
            hi[i] += h;
            lo[i] -= h;
            const double fd = (f(hi) - f(lo)) / (2.0 * h);
            const double denom = std::max({1.0, std::fabs(fd), std::fabs(grad[i])});
            if (std::fabs(grad[i] - fd) / denom >= tol) {
                check.expect(false, std::string(name) + " grad mismatch");
                return;
            }
        }
    };

    for (const std::size_t k : {2u, 3u, 5u, 10u}) {
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> logits(k), ref(k), scores(k);
            for (std::size_t i = 0; i < k; ++i) {
                logits[i] = 4.0 * rng.next_double() - 2.0;
                ref[i] = 4.0 * rng.next_double() - 2.0;
                scores[i] = -0.5 - static_cast<double>(i) - rng.next_double();
            }
            const double original = -1.0 - 3.0 * rng.next_double();
            const double delta = 0.5 + rng.next_double();
            const std::size_t best = rng.uniform_below(k);

            const auto with = [&](const std::vector<double>& x) {
                auto b = batch_of(x, scores);
                b.original_score = original;
                b.ref_logits = ref;
                return b;
            };

            struct Case {
                const char* name;
                std::function<L::LossValue(const std::vector<double>&)> f;
            };
            const Case cases[] = {
                {"CE", [&](const auto& x) { return L::cross_entropy_best(x, best); }},
                {"MR", [&](const auto& x) { return L::margin_ranking_loss(with(x)); }},
                {"AS", [&](const auto& x) { return L::avg_score_loss(with(x)); }},
                {"BS", [&](const auto& x) { return L::best_score_loss(with(x)); }},
                {"MR+AS",
                 [&](const auto& x) { return L::combined_loss(with(x), L::CombineMode::MR_AS); }},
                {"MR+BS",
                 [&](const auto& x) { return L::combined_loss(with(x), L::CombineMode::MR_BS); }},
                {"DPO(PL)", [&](const auto& x) { return L::dpo_pl_loss(x, ref, delta); }},
                {"DPO*", [&](const auto& x) { return L::dpo_star_loss(with(x)); }},
                {"sigmaDPO*", [&](const auto& x) { return L::sigma_dpo_star_loss(with(x)); }},
            };
            for (const auto& c : cases) {
                const auto out = c.f(logits);
                fd_check([&](const auto& x) { return c.f(x).value; }, out.grad, logits, c.name);
            }
        }
    }

    const double elapsed = now_seconds() - t0;
    check.expect(elapsed < 60.0, "runtime exceeded 1 min");
    check.finish(elapsed);
}

void criterion_3_dpo_identities() {
    Check check(3, "dpo identities");
    models::Rng rng(0x64706f);

    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.uniform_below(9);
        std::vector<double> logits(k), scores(k);
        for (std::size_t i = 0; i < k; ++i) {
            logits[i] = 6.0 * rng.next_double() - 3.0;
            scores[i] = -static_cast<double>(i) - rng.next_double();
        }
        auto b = batch_of(logits, scores);
        b.ref_logits = logits;  // policy == reference
        check.expect(L::dpo_star_loss(b).value == 0.0, "DPO* nonzero at policy==reference");
        check.expect(near(L::sigma_dpo_star_loss(b).value,
                          static_cast<double>(k - 1) * std::log(2.0), 1e-12),
                     "sigmaDPO* != (K-1) ln 2");
    }

    for (int trial = 0; trial < 1000; ++trial) {
        const double delta = 0.1 + 3.0 * rng.next_double();
        const std::vector<double> p{6.0 * rng.next_double() - 3.0,
                                    6.0 * rng.next_double() - 3.0};
        const std::vector<double> r{6.0 * rng.next_double() - 3.0,
                                    6.0 * rng.next_double() - 3.0};
        const double bt = -L::log_sigmoid(delta * ((p[0] - r[0]) - (p[1] - r[1])));
        check.expect(near(L::dpo_pl_loss(p, r, delta).value, bt, 1e-12),
                     "PL(K=2) != Bradley-Terry");
    }
    check.finish();
}

void criterion_4_pvalue_oracle() {
    Check check(4, "p-value oracle");
    models::Rng rng(0x7076);

    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.uniform_below(64);
        std::vector<double> refs(n);
        for (auto& s : refs) s = -40.0 * rng.next_double();
        const double target = -40.0 * rng.next_double();

        std::size_t count = 0;
        for (double s : refs)
            if (s > target) ++count;

        const auto r = stats::reference_pvalue(target, refs);
        check.expect(r.n_exceeding == count, "indicator count mismatch");
        check.expect(r.p_value == static_cast<double>(count) / static_cast<double>(n),
                     "p-value not exactly count/(Ks-1)");
        check.expect(r.k_s == n + 1, "K_s bookkeeping");

        const auto higher = stats::reference_pvalue(target + 2.0 * rng.next_double(), refs);
        check.expect(higher.p_value <= r.p_value, "monotonicity violated");
    }
    check.finish();
}

void criterion_5_substitution_rule() {
    Check check(5, "substitution rule");
    models::Rng rng(0x737562);
    const Sentence sentence = tokenize("the cat sat on the mat");

    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = 1 + rng.uniform_below(8);
        CandidatePool pool;
        pool.site = make_site(sentence, 1);
        double best = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double p = rng.next_double();
            best = std::max(best, p);
            pool.candidates.push_back("w" + std::to_string(i));
            pool.probabilities.push_back(p);
            pool.logits.push_back(std::log(p + 1e-12));
        }

        // case A: the original token is the argmax -> never replace
        pool.original_probability = best + rng.next_double() + 1e-9;
        check.expect(subst::decide(pool).action == Action::KEEP,
                     "replaced although the original is argmax");

        // case B: random original; compare against an exhaustive scan
        const double original = rng.next_double();
        pool.original_probability = original;
        const auto d = subst::decide(pool);
        std::optional<std::string> expect;
        double top = original;
        for (std::size_t i = 0; i < k; ++i) {
            if (pool.probabilities[i] > top) {
                top = pool.probabilities[i];
                expect = pool.candidates[i];
            }
        }
        if (expect) {
            check.expect(d.action == Action::REPLACE && d.replacement == expect,
                         "argmax among better candidates not selected");
        } else {
            check.expect(d.action == Action::KEEP, "replaced without a better candidate");
        }
    }
    check.finish();
}

void criterion_6_stratification() {
    Check check(6, "stratification");
    models::Rng rng(0x737472);
    const Sentence sentence = tokenize("alpha beta gamma delta epsilon zeta");
    const std::vector<std::string> words{"red", "blue", "green", "amber"};

    // synthetic annotated corpus of 1000 tokens engineered to hit all groups
    std::vector<AnnotatedToken> tokens;
    std::map<stats::GroupLabel, std::size_t> expected;
    for (int i = 0; i < 1000; ++i) {
        AnnotatedToken t;
        t.site = make_site(sentence, rng.uniform_below(sentence.size()));
        const auto r = rng.uniform_below(5);
        const bool annotator = r == 0 || r == 1 || r == 4;
        const bool model = r == 1 || r == 2 || r == 4;
        if (annotator) {
            t.annotator_suggestions.insert(words[rng.uniform_below(2)]);
            if (rng.next_double() < 0.5) t.annotator_suggestions.insert(words[2]);
        }
        t.model_decision.action = model ? Action::REPLACE : Action::KEEP;
        if (model) {
            t.model_decision.replacement = words[rng.uniform_below(words.size())];
            t.model_decision.chosen_probability = 0.6;
            t.model_decision.original_probability = 0.2;
        }

        // independent enumeration of the expected label
        stats::GroupLabel label;
        if (!annotator && !model) label = stats::GroupLabel::NCA;
        else if (annotator && !model) label = stats::GroupLabel::OAC;
        else if (!annotator) label = stats::GroupLabel::OMC;
        else if (t.annotator_suggestions.count(*t.model_decision.replacement) > 0)
            label = stats::GroupLabel::CA;
        else
            label = stats::GroupLabel::CD;
        ++expected[label];
        tokens.push_back(std::move(t));
    }

    std::map<stats::GroupLabel, std::size_t> got;
    for (const auto& t : tokens) ++got[stats::stratify(t)];
    check.expect(got == expected, "group counts differ from enumeration");
    check.expect(expected.size() == 5, "fixture failed to hit all five groups");
    std::size_t total = 0;
    for (const auto& [g, n] : got) total += n;
    check.expect(total == 1000, "labels do not partition the corpus");

    // row-normalization fixture: annotator-changed row of 74/11/15
    std::map<stats::GroupLabel, std::size_t> fixture{{stats::GroupLabel::OAC, 74},
                                                     {stats::GroupLabel::CA, 11},
                                                     {stats::GroupLabel::CD, 15},
                                                     {stats::GroupLabel::NCA, 94},
                                                     {stats::GroupLabel::OMC, 6}};
    const auto prop = stats::row_proportions(fixture);
    check.expect(near(prop.at(stats::GroupLabel::OAC), 0.74, 1e-12), "OAC proportion");
    check.expect(near(prop.at(stats::GroupLabel::CA), 0.11, 1e-12), "CA proportion");
    check.expect(near(prop.at(stats::GroupLabel::CD), 0.15, 1e-12), "CD proportion");
    check.finish();
}

void criterion_7_metric_oracles() {
    Check check(7, "metric oracles");
    models::Rng rng(0x6d6574);
    const Sentence sentence = tokenize("one two three four five six");

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 2 + rng.uniform_below(7);
        CandidatePool pool;
        pool.site = make_site(sentence, 1);
        ScoreRecord record;
        record.original_score = -30.0 * rng.next_double() - 0.5;
        for (std::size_t i = 0; i < k; ++i) {
            const double p = 0.01 + 0.98 * rng.next_double();
            pool.candidates.push_back("w" + std::to_string(i));
            pool.probabilities.push_back(p);
            pool.logits.push_back(std::log(p));
            record.candidate_scores.push_back(-30.0 * rng.next_double() - 0.5);
        }

        // straight-line reimplementations
        double dot = 0, na = 0, nb = 0, ratio_sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double lp = std::log(pool.probabilities[i]);
            dot += lp * record.candidate_scores[i];
            na += lp * lp;
            nb += record.candidate_scores[i] * record.candidate_scores[i];
            ratio_sum += record.candidate_scores[i] / record.original_score;
        }
        const double cs_ref = dot / (std::sqrt(na) * std::sqrt(nb));
        const double abr_ref = ratio_sum / static_cast<double>(k);

        check.expect(near(metrics::cs(pool, record), cs_ref, 1e-9), "CS mismatch");
        check.expect(near(metrics::abr(record), abr_ref, 1e-9), "ABR mismatch");
    }

    ScoreRecord fixture;
    fixture.original_score = -10.0;
    fixture.candidate_scores = {-9.0, -11.0};
    check.expect(metrics::abr(fixture) == 1.0, "ABR fixture not exactly 1.0");
    check.finish();
}

void criterion_8_scorer_contract() {
    Check check(8, "scorer contract");
    const auto t0 = now_seconds();

    synth::SynthOptions options;
    options.n_sentences = 80;
    options.pairs_per_sentence = 2;
    const auto corpus = synth::generate(options);
    const auto vocab = models::Vocab::build(corpus.sentences);

    // fixed tiny checkpoint: train briefly, save, reload
    const auto dir = std::filesystem::temp_directory_path() / "sws_acceptance_scorer";
    std::filesystem::create_directories(dir);
    {
        models::TinySeq2Seq fresh(
            vocab, models::Seq2SeqConfig{.embed_dim = 16, .hidden_dim = 32, .max_positions = 128},
            41);
        models::PretrainOptions popt;
        popt.epochs = 2;
        fresh.pretrain(corpus.paraphrase_pairs, popt);
        fresh.save(dir / "seq2seq.bin");
    }
    auto model = std::make_shared<models::TinySeq2Seq>(
        models::TinySeq2Seq::load(dir / "seq2seq.bin"));

    ScorerConfig config;
    config.model_id = "acceptance";
    const Scorer scorer(std::make_shared<Seq2SeqScoreBackend>(model), config);

    models::Rng rng(0x73636f);
    for (int trial = 0; trial < 25; ++trial) {
        const auto& src_text = corpus.sentences[rng.uniform_below(corpus.sentences.size())];
        const auto& tgt_text = corpus.sentences[rng.uniform_below(corpus.sentences.size())];
        const auto src = tokenize(src_text);
        const auto tgt = tokenize(tgt_text);

        const double value = scorer.score(src, tgt);
        const auto src_ids = vocab.ids(src);
        const auto tgt_ids = vocab.ids(tgt);
        double oracle = 0.0;
        for (std::size_t n = 0; n < tgt_ids.size(); ++n) {
            const int prev = n == 0 ? models::Vocab::kBos : tgt_ids[n - 1];
            oracle += model->step_log_probs(src_ids, prev, n)[tgt_ids[n]];
        }
        check.expect(near(value, oracle, 1e-5), "score differs from stepwise oracle");

        // batch == sequential, bitwise
        std::vector<Sentence> batch{tgt, src, tgt};
        const auto results = scorer.score_batch(src, batch);
        check.expect(results[0] == value && results[2] == value &&
                         results[1] == scorer.score(src, src),
                     "batch/sequential mismatch");
    }

    // cache round trip over 1000 entries, persisted and reopened
    const auto cache_path = dir / "cache.jsonl";
    std::filesystem::remove(cache_path);
    std::vector<double> stored(1000);
    {
        ScoreCache cache(cache_path);
        models::Rng vals(0x636163);
        for (int i = 0; i < 1000; ++i) {
            stored[static_cast<std::size_t>(i)] = -100.0 * vals.next_double();
            cache.store("acc", "src-" + std::to_string(i), "tgt-" + std::to_string(i),
                        stored[static_cast<std::size_t>(i)]);
        }
    }
    {
        ScoreCache cache(cache_path);
        bool all = true;
        for (int i = 0; i < 1000; ++i) {
            const auto hit =
                cache.lookup("acc", "src-" + std::to_string(i), "tgt-" + std::to_string(i));
            all = all && hit && *hit == stored[static_cast<std::size_t>(i)];
        }
        check.expect(all, "cache round trip lost or altered entries");
        check.expect(cache.size() == 1000, "cache size after reopen");
    }
    std::filesystem::remove_all(dir);
    check.finish(now_seconds() - t0);
}

struct DirectionRun {
    double base_cs = 0.0;
    double mras_cs = 0.0;
    double mr_abr = 0.0;
    double mras_abr = 0.0;
    double seconds = 0.0;
};

DirectionRun run_training_direction() {
    const auto t0 = now_seconds();

    synth::SynthOptions options;
    options.n_sentences = 250;  // 200 train + 50 held out
    options.pairs_per_sentence = 4;
    options.seed = 20240901;
    const auto corpus = synth::generate(options);

    std::vector<std::string> train_sentences(corpus.sentences.begin(),
                                             corpus.sentences.begin() + 200);
    std::vector<std::string> heldout_sentences(corpus.sentences.begin() + 200,
                                               corpus.sentences.end());
    const auto train_records = synth::as_records(train_sentences, "train");
    const auto heldout_records = synth::as_records(heldout_sentences, "held");

    const auto vocab = models::Vocab::build(corpus.sentences);
    const std::uint64_t run_seed = 21;

    models::TinyMaskedLM base(vocab, models::MaskedLmConfig{}, 100 + run_seed);
    {
        models::PretrainOptions popt;
        popt.epochs = 30;
        popt.learning_rate = 0.01;
        base.pretrain(train_sentences, popt);
    }

    auto seq2seq =
        std::make_shared<models::TinySeq2Seq>(vocab, models::Seq2SeqConfig{}, 200 + run_seed);
    {
        models::PretrainOptions popt;
        popt.epochs = 8;
        popt.learning_rate = 0.01;
        seq2seq->pretrain(corpus.paraphrase_pairs, popt);
    }

    ScorerConfig scorer_config;
    scorer_config.model_id = "direction";
    auto cache = std::make_shared<ScoreCache>();
    const Scorer scorer(std::make_shared<Seq2SeqScoreBackend>(seq2seq), scorer_config, cache);

    train::TrainConfig config;
    config.loss_mode = train::LossMode::MR_AS;
    config.epochs = 5;
    config.batch_size = 8;
    config.learning_rate = 0.002;
    config.grad_clip_max_norm = train::kGradClipSmoke;  // the 1.0 preset
    config.dropout_rate = 0.1;
    config.lambda_margin = 0.5;
    config.gamma_mix = 1.0;
    config.sites_per_sentence = 5;
    config.pool_size = 5;
    config.corpus_sample = train_records.size();
    config.rng_seed = run_seed;

    SamplingPlan eval_plan;
    eval_plan.sites_per_sentence = 5;
    eval_plan.pool_size = 5;
    eval_plan.rng_seed = 1;

    const auto evaluate = [&](const models::TinyMaskedLM& model) {
        eval::EvalOptions opts;
        opts.plan = eval_plan;
        opts.with_top2 = false;
        const auto r = eval::evaluate_model(model, scorer, heldout_records, opts);
        return std::pair<double, double>(metrics::aggregate(r.cs_values).median,
                                         metrics::aggregate(r.abr_values).median);
    };

    DirectionRun out;
    const auto [base_cs, base_abr] = evaluate(base);
    out.base_cs = base_cs;

    const auto workdir = std::filesystem::temp_directory_path() / "sws_acceptance_train";
    std::filesystem::remove_all(workdir);

    models::TinyMaskedLM mras = base;  // same initialization for both runs
    train::fine_tune(mras, scorer, train_records, config, workdir / "mr_as");
    const auto [mras_cs, mras_abr] = evaluate(mras);
    out.mras_cs = mras_cs;
    out.mras_abr = mras_abr;

    models::TinyMaskedLM mr = base;
    auto mr_config = config;
    mr_config.loss_mode = train::LossMode::MR;
    train::fine_tune(mr, scorer, train_records, mr_config, workdir / "mr");
    const auto [mr_cs, mr_abr] = evaluate(mr);
    out.mr_abr = mr_abr;

    std::filesystem::remove_all(workdir);
    out.seconds = now_seconds() - t0;
    return out;
}

void criteria_9_10_training_direction() {
    DirectionRun run;
    bool crashed = false;
    std::string what;
    try {
        run = run_training_direction();
    } catch (const std::exception& e) {
        crashed = true;
        what = e.what();
    }

    {
        Check check(9, "training direction: MR+AS raises held-out CS");
        if (crashed) {
            check.expect(false, what);
        } else {
            char detail[160];
            std::snprintf(detail, sizeof detail, "median CS base %.4f vs MR+AS %.4f",
                          run.base_cs, run.mras_cs);
            check.expect(run.mras_cs > run.base_cs, detail);
            check.expect(run.seconds < 1800.0, "runtime exceeded 30 min");
            check.note(detail);
        }
        check.finish(run.seconds);
    }
    {
        Check check(10, "ranking-vs-quality trade-off: ABR(MR) <= ABR(MR+AS)");
        if (crashed) {
            check.expect(false, what);
        } else {
            char detail[160];
            std::snprintf(detail, sizeof detail, "median ABR MR %.4f vs MR+AS %.4f", run.mr_abr,
                          run.mras_abr);
            check.expect(run.mr_abr <= run.mras_abr, detail);
            check.note(detail);
        }
        check.finish();
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void criterion_11_prompts_and_retries() {
    Check check(11, "prompt golden files and retry logic");
    const std::string golden(SWS_GOLDEN_DIR);

    check.expect(std::string(llm::kPromptWithoutRanking) ==
                     read_file(golden + "/prompt_without_ranking.txt"),
                 "unranked prompt differs from golden file");
    check.expect(std::string(llm::kPromptWithRanking) ==
                     read_file(golden + "/prompt_with_ranking.txt"),
                 "ranked prompt differs from golden file");
    check.expect(std::string(kGptScoreParaphraseTemplate) ==
                     read_file(golden + "/gptscore_paraphrase_template.txt"),
                 "paraphrase template differs from golden file");

    // fault injection against a scripted transport
    class Script final : public llm::ChatTransport {
      public:
        explicit Script(std::vector<std::string> r) : responses_(std::move(r)) {}
        std::string complete(const std::string&) override {
            ++calls_;
            return responses_[std::min(next_++, responses_.size() - 1)];
        }
        std::size_t calls_ = 0;

      private:
        std::vector<std::string> responses_;
        std::size_t next_ = 0;
    };

    const auto sentence = tokenize("the critical role of law");
    llm::ClientConfig config;
    config.endpoint = "http://stub";
    config.max_retries = 3;

    {
        Script transport({"garbage", "{\"critical\": [broken", R"({"critical": ["crucial"]})"});
        const auto result = llm::prompt_suggestions(sentence, true, config, transport);
        check.expect(result.retry_count == 2, "retry_count after two faults");
        check.expect(transport.calls_ == 3, "call count after two faults");
        check.expect(result.entries.size() == 1 && result.entries[0].second.size() == 1,
                     "parsed entry after retries");
    }
    {
        Script transport({"junk"});
        bool threw = false;
        try {
            llm::prompt_suggestions(sentence, true, config, transport);
        } catch (const Error& e) {
            threw = e.code() == ErrorCode::MALFORMED_RESPONSE;
        }
        check.expect(threw, "MALFORMED_RESPONSE not raised");
        check.expect(transport.calls_ == config.max_retries,
                     "external calls exceeded max_retries");
    }
    check.finish();
}

}  // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    criterion_1_loss_exactness();
    criterion_2_gradients();
    criterion_3_dpo_identities();
    criterion_4_pvalue_oracle();
    criterion_5_substitution_rule();
    criterion_6_stratification();
    criterion_7_metric_oracles();
    criterion_8_scorer_contract();
    criteria_9_10_training_direction();
    criterion_11_prompts_and_retries();

    if (g_failures > 0) {
        std::printf("\n%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("\nall criteria passed\n");
    return 0;
}

#include <cmath>
#include <doctest.h>

#include "sws/error.hpp"
#include "sws/metrics.hpp"
#include "sws/models/nn.hpp"

using namespace sws;
using namespace sws::metrics;

namespace {

CandidatePool pool_with(std::vector<double> probabilities) {
    static Sentence sentence = tokenize("the cat sat on the mat");
    CandidatePool pool;
    pool.site = make_site(sentence, 1);
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        pool.candidates.push_back("w" + std::to_string(i));
        pool.logits.push_back(std::log(probabilities[i]));
    }
    pool.probabilities = std::move(probabilities);
    return pool;
}

ScoreRecord record_with(double original, std::vector<double> scores) {
    ScoreRecord r;
    r.original_score = original;
    r.candidate_scores = std::move(scores);
    r.scorer_id = "test";
    return r;
}

}  // namespace

TEST_CASE("cosine basics") {
    CHECK(cosine(std::vector<double>{-1, -2}, std::vector<double>{-2, -1}) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 1}), Error);
    CHECK_THROWS_AS(cosine(std::vector<double>{1}, std::vector<double>{1, 1}), Error);
}

TEST_CASE("cs is 1 for collinear log-probabilities and scores") {
    // log p = (-1, -2, -3); scores proportional by a positive factor
    auto pool = pool_with({std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)});
    const auto record = record_with(-10.0, {-2.0, -4.0, -6.0});
    CHECK(cs(pool, record) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cs requires at least two candidates") {
    auto pool = pool_with({1.0});
    CHECK_THROWS_AS(cs(pool, record_with(-1.0, {-1.0})), Error);
}

TEST_CASE("cs pool renormalization rescales the log vector") {
    auto pool = pool_with({0.2, 0.1});  // sums to 0.3 over the pool
    const auto record = record_with(-10.0, {-3.0, -7.0});
    const double full = cs(pool, record, CsProbabilities::FULL_VOCAB);
    const double renorm = cs(pool, record, CsProbabilities::POOL_RENORMALIZED);
    // hand-computed: log(2/3), log(1/3) against the same scores
    const double expected = cosine(std::vector<double>{std::log(2.0 / 3.0), std::log(1.0 / 3.0)},
                                   record.candidate_scores);
    CHECK(renorm == doctest::Approx(expected).epsilon(1e-12));
    CHECK(full != renorm);
}

TEST_CASE("cs scale invariance and sign flip") {
    models::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng.uniform_below(6);
        std::vector<double> p(k), s(k);
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = 0.05 + 0.9 * rng.next_double();
            s[i] = -10.0 * rng.next_double() - 0.1;
        }
        auto pool = pool_with(p);
        const double base = cs(pool, record_with(-5.0, s));

        auto scaled = s;
        for (auto& v : scaled) v *= 3.5;
        CHECK(cs(pool, record_with(-5.0, scaled)) == doctest::Approx(base).epsilon(1e-9));

        auto flipped = s;
        for (auto& v : flipped) v = -v;
        CHECK(cs(pool, record_with(-5.0, flipped)) == doctest::Approx(-base).epsilon(1e-9));
    }
}

TEST_CASE("abr values") {
    CHECK(abr(record_with(-7.0, {-7.0, -7.0, -7.0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(abr(record_with(-10.0, {-9.0, -11.0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(abr(record_with(-10.0, {-8.0, -8.0})) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(abr(record_with(0.0, {-1.0})), Error);
}

TEST_CASE("top2 ratio") {
    CHECK(top2_ratio(-10.0, -10.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(top2_ratio(-10.0, -9.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(top2_ratio(-10.0, -12.0) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK_THROWS_AS(top2_ratio(0.0, -1.0), Error);
}

TEST_CASE("aggregate medians") {
    CHECK(aggregate(std::vector<double>{1, 2, 3}).median == 2.0);
    // even count: lower middle, not midpoint
    CHECK(aggregate(std::vector<double>{1, 2, 3, 4}).median == 2.0);
    CHECK(aggregate(std::vector<double>{5, 5, 5}).sd == 0.0);
    CHECK_THROWS_AS(aggregate(std::vector<double>{}), Error);
}

TEST_CASE("aggregate is permutation invariant") {
    const std::vector<double> a{3.0, -1.0, 2.5, 7.0, 0.0};
    const std::vector<double> b{7.0, 0.0, -1.0, 3.0, 2.5};
    const auto ra = aggregate(a), rb = aggregate(b);
    CHECK(ra.median == rb.median);
    CHECK(ra.mean == rb.mean);
    CHECK(ra.sd == rb.sd);
    for (std::size_t i = 0; i < ra.histogram.size(); ++i)
        CHECK(ra.histogram[i].count == rb.histogram[i].count);
}

TEST_CASE("aggregate histogram covers all values") {
    models::Rng rng(13);
    std::vector<double> v(500);
    for (auto& x : v) x = 10.0 * rng.next_double() - 5.0;
    const auto agg = aggregate(v, 50);
    std::size_t total = 0;
    for (const auto& bin : agg.histogram) total += bin.count;
    CHECK(total == v.size());
    CHECK(agg.histogram.size() == 50);

    const auto constant = aggregate(std::vector<double>{2.0, 2.0}, 50);
    CHECK(constant.histogram.size() == 1);
    CHECK(constant.histogram[0].count == 2);
}

// straight-line reimplementations, kept deliberately independent of the
// library code paths
namespace oracle {

double cs_ref(const std::vector<double>& probs, const std::vector<double>& scores) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double lp = std::log(probs[i]);
        dot += lp * scores[i];
        na += lp * lp;
        nb += scores[i] * scores[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double abr_ref(double original, const std::vector<double>& scores) {
    double acc = 0;
    for (double s : scores) acc += s / original;
    return acc / static_cast<double>(scores.size());
}

}  // namespace oracle

TEST_CASE("cs and abr match an independent reimplementation") {
    models::Rng rng(19);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 2 + rng.uniform_below(8);
        std::vector<double> p(k), s(k);
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = 0.01 + 0.98 * rng.next_double();
            s[i] = -30.0 * rng.next_double() - 0.5;
        }
        const double original = -30.0 * rng.next_double() - 0.5;
        auto pool = pool_with(p);
        const auto record = record_with(original, s);
        CHECK(std::fabs(cs(pool, record) - oracle::cs_ref(p, s)) < 1e-9);
        CHECK(std::fabs(abr(record) - oracle::abr_ref(original, s)) < 1e-9);
    }
}

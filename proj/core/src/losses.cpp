#include "sws/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sws/error.hpp"

namespace sws::losses {

namespace {

void require_sorted_scores(const LossBatch& batch) {
    for (std::size_t i = 0; i + 1 < batch.scores.size(); ++i)
        if (batch.scores[i] < batch.scores[i + 1])
            throw Error(ErrorCode::UNSORTED_BATCH, "scores must be non-increasing");
}

void require_aligned(const LossBatch& batch) {
    if (batch.logits.size() != batch.scores.size())
        throw Error(ErrorCode::LENGTH_MISMATCH, "logits and scores disagree on K");
    if (batch.ref_logits && batch.ref_logits->size() != batch.logits.size())
        throw Error(ErrorCode::LENGTH_MISMATCH, "ref_logits disagree on K");
}

const std::vector<double>& require_reference(const LossBatch& batch) {
    if (!batch.ref_logits)
        throw Error(ErrorCode::MISSING_REFERENCE, "loss requires reference logits");
    return *batch.ref_logits;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        z += out[i];
    }
    for (auto& v : out) v /= z;
    return out;
}

double log_sum_exp(std::span<const double> values) {
    const double m = *std::max_element(values.begin(), values.end());
    double z = 0.0;
    for (double v : values) z += std::exp(v - m);
    return m + std::log(z);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    // -log(1 + exp(-x)), written to avoid overflow on both tails
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

std::vector<std::size_t> ranking_order(std::span<const double> logits,
                                       std::span<const double> scores) {
    if (logits.size() != scores.size())
        throw Error(ErrorCode::LENGTH_MISMATCH, "logits and scores disagree on K");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return logits[a] > logits[b];  // tie: higher logit first, then original index
    });
    return order;
}

std::vector<std::size_t> sort_for_ranking(std::vector<double>& logits,
                                          std::vector<double>& scores) {
    auto order = ranking_order(logits, scores);
    std::vector<double> l(logits.size()), s(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        l[i] = logits[order[i]];
        s[i] = scores[order[i]];
    }
    logits = std::move(l);
    scores = std::move(s);
    return order;
}

LossValue margin_ranking_loss(const LossBatch& batch) {
    require_aligned(batch);
    require_sorted_scores(batch);
    const auto& s = batch.logits;
    const std::size_t k = s.size();

    LossValue out;
    out.grad.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double margin = batch.margin_unit * static_cast<double>(b - a);
            const double arg = s[b] - s[a] + margin;
            if (arg > 0.0) {
                out.value += arg;
                out.grad[b] += 1.0;
                out.grad[a] -= 1.0;
            }
        }
    }
    return out;
}

LossValue avg_score_loss(const LossBatch& batch) {
    require_aligned(batch);
    const auto h = softmax(batch.logits);
    const std::size_t k = h.size();

    double weighted = 0.0;
    for (std::size_t i = 0; i < k; ++i) weighted += h[i] * batch.scores[i];

    LossValue out;
    out.value = -weighted;
    out.grad.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.grad[i] = h[i] * (weighted - batch.scores[i]);
    return out;
}

LossValue best_score_loss(const LossBatch& batch, TopWeight weight) {
    require_aligned(batch);
    require_sorted_scores(batch);
    const std::size_t k = batch.logits.size();
    const double deficit = batch.original_score - batch.scores[0];

    LossValue out;
    out.grad.assign(k, 0.0);

    if (weight == TopWeight::SOFTMAX) {
        const auto h = softmax(batch.logits);
        const double arg = deficit * h[0];
        if (arg > 0.0) {
            out.value = arg;
            for (std::size_t i = 0; i < k; ++i)
                out.grad[i] = deficit * h[0] * ((i == 0 ? 1.0 : 0.0) - h[i]);
        }
    } else {
        const double arg = deficit * batch.logits[0];
        if (arg > 0.0) {
            out.value = arg;
            out.grad[0] = deficit;
        }
    }
    return out;
}

LossValue combined_loss(const LossBatch& batch, CombineMode mode, TopWeight weight) {
    LossValue mr = margin_ranking_loss(batch);
    LossValue other = (mode == CombineMode::MR_AS) ? avg_score_loss(batch)
                                                   : best_score_loss(batch, weight);
    LossValue out;
    out.value = mr.value + batch.mix_weight * other.value;
    out.grad.resize(mr.grad.size());
    for (std::size_t i = 0; i < out.grad.size(); ++i)
        out.grad[i] = mr.grad[i] + batch.mix_weight * other.grad[i];
    return out;
}

LossValue dpo_pl_loss(std::span<const double> policy_logliks,
                      std::span<const double> ref_logliks, double delta) {
    if (policy_logliks.size() != ref_logliks.size())
        throw Error(ErrorCode::LENGTH_MISMATCH, "policy/reference length mismatch");
    const std::size_t k = policy_logliks.size();
    if (k == 0) throw Error(ErrorCode::EMPTY_INPUT, "empty preference list");

    std::vector<double> r(k);
    for (std::size_t i = 0; i < k; ++i) r[i] = delta * (policy_logliks[i] - ref_logliks[i]);

    LossValue out;
    out.grad.assign(k, 0.0);
    // L = sum_k [ logsumexp_{j>=k} r_j - r_k ];  each suffix softmax contributes
    // delta * w_{k,i} to grad[i] for i >= k, and the -r_k term contributes -delta.
    for (std::size_t start = 0; start < k; ++start) {
        std::span<const double> tail(r.data() + start, k - start);
        const double lse = log_sum_exp(tail);
        out.value += lse - r[start];
        for (std::size_t i = start; i < k; ++i) out.grad[i] += delta * std::exp(r[i] - lse);
        out.grad[start] -= delta;
    }
    return out;
}

LossValue dpo_star_loss(const LossBatch& batch) {
    require_aligned(batch);
    require_sorted_scores(batch);
    const auto& ref = require_reference(batch);
    const auto& s = batch.logits;
    const std::size_t k = s.size();

    LossValue out;
    out.grad.assign(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i)
        out.value -= (s[i] - ref[i]) - (s[i + 1] - ref[i + 1]);
    if (k >= 2) {
        out.grad[0] = -1.0;  // adjacent differences telescope
        out.grad[k - 1] = 1.0;
    }
    return out;
}

LossValue sigma_dpo_star_loss(const LossBatch& batch) {
    require_aligned(batch);
    require_sorted_scores(batch);
    const auto& ref = require_reference(batch);
    const auto& s = batch.logits;
    const std::size_t k = s.size();

    LossValue out;
    out.grad.assign(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double t = (s[i] - ref[i]) - (s[i + 1] - ref[i + 1]);
        out.value -= log_sigmoid(t);
        const double d = sigmoid(t) - 1.0;  // d(-log sigma(t))/dt
        out.grad[i] += d;
        out.grad[i + 1] -= d;
    }
    return out;
}

LossValue cross_entropy_best(std::span<const double> logits, std::size_t best_index) {
    if (best_index >= logits.size())
        throw Error(ErrorCode::INDEX_OUT_OF_RANGE, "best_index out of range");
    const auto h = softmax(logits);
    LossValue out;
    out.value = -(logits[best_index] - log_sum_exp(logits));
    out.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        out.grad[i] = h[i] - (i == best_index ? 1.0 : 0.0);
    return out;
}

}  // namespace sws::losses

#include "sws/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sws/error.hpp"

namespace sws::metrics {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LENGTH_MISMATCH, "vector lengths differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZERO_VECTOR, "cosine of zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double cs(const CandidatePool& pool, const ScoreRecord& record, CsProbabilities mode) {
    if (pool.size() < 2)
        throw Error(ErrorCode::EMPTY_INPUT, "cosine alignment needs at least two candidates");
    if (record.candidate_scores.size() != pool.size())
        throw Error(ErrorCode::LENGTH_MISMATCH, "score record does not match pool");

    double total = 0.0;
    for (double p : pool.probabilities) {
        if (!(p > 0.0)) throw Error(ErrorCode::ZERO_VECTOR, "non-positive pool probability");
        total += p;
    }

    std::vector<double> log_p(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        log_p[i] = std::log(mode == CsProbabilities::POOL_RENORMALIZED
                                ? pool.probabilities[i] / total
                                : pool.probabilities[i]);
    }
    return cosine(log_p, record.candidate_scores);
}

double abr(const ScoreRecord& record) {
    if (record.original_score == 0.0)
        throw Error(ErrorCode::ZERO_ORIGINAL_SCORE, "original score is zero");
    if (record.candidate_scores.empty()) throw Error(ErrorCode::EMPTY_INPUT, "no candidate scores");
    // mean of s_k / M(X), summed before dividing so exact ratios stay exact
    double sum = 0.0;
    for (double s : record.candidate_scores) sum += s;
    return sum / (record.original_score * static_cast<double>(record.candidate_scores.size()));
}

double top2_ratio(double original_score, double top2_score) {
    if (original_score == 0.0)
        throw Error(ErrorCode::ZERO_ORIGINAL_SCORE, "original score is zero");
    return top2_score / original_score;
}

Aggregate aggregate(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw Error(ErrorCode::EMPTY_INPUT, "nothing to aggregate");
    if (bins == 0) bins = 1;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    Aggregate out;
    out.median = sorted[(sorted.size() - 1) / 2];

    double sum = 0.0;
    for (double v : sorted) sum += v;
    out.mean = sum / static_cast<double>(sorted.size());

    double ss = 0.0;
    for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(sorted.size()));

    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        out.histogram.push_back({lo, hi, sorted.size()});
        return out;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    out.histogram.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out.histogram[i].left = lo + width * static_cast<double>(i);
        out.histogram[i].right = (i + 1 == bins) ? hi : lo + width * static_cast<double>(i + 1);
    }
    for (double v : sorted) {
        auto idx = static_cast<std::size_t>((v - lo) / width);
        if (idx >= bins) idx = bins - 1;  // v == hi lands in the last bin
        ++out.histogram[idx].count;
    }
    return out;
}

}  // namespace sws::metrics

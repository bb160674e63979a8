#pragma once

#include <span>
#include <vector>

#include "sws/pool.hpp"

namespace sws::metrics {

// Which probabilities feed the log-transform: the model's full normalization
// set (default) or probabilities renormalized within the pool.
enum class CsProbabilities { FULL_VOCAB, POOL_RENORMALIZED };

// Cosine similarity between the natural-log pool probabilities and the
// candidate scores. Requires K >= 2 and strictly positive probabilities.
double cs(const CandidatePool& pool, const ScoreRecord& record,
          CsProbabilities mode = CsProbabilities::FULL_VOCAB);

double cosine(std::span<const double> a, std::span<const double> b);

// Mean of per-candidate score ratios M(X~_k) / M(X), reported raw: scores are
// negative, so ratios above 1 indicate candidates scoring below the original.
double abr(const ScoreRecord& record);

double top2_ratio(double original_score, double top2_score);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

struct Aggregate {
    double median = 0.0;  // lower-middle convention for even counts
    double mean = 0.0;
    double sd = 0.0;      // population standard deviation
    std::vector<HistogramBin> histogram;
};

Aggregate aggregate(std::span<const double> values, std::size_t bins = 50);

}  // namespace sws::metrics

#include "sws/pool.hpp"

#include <cmath>
#include <unordered_set>

#include "sws/error.hpp"

namespace sws {

void validate_pool(const CandidatePool& pool) {
    const std::size_t k = pool.candidates.size();
    if (k == 0) throw Error(ErrorCode::EMPTY_INPUT, "candidate pool is empty");
    if (pool.logits.size() != k || pool.probabilities.size() != k)
        throw Error(ErrorCode::LENGTH_MISMATCH, "pool fields disagree on K");

    std::unordered_set<std::string> seen;
    for (const auto& c : pool.candidates)
        if (!seen.insert(c).second)
            throw Error(ErrorCode::PARSE_ERROR, "duplicate candidate '" + c + "' in pool");

    // softmax monotonicity: probabilities non-increasing in logits
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (pool.logits[i] < pool.logits[i + 1] && pool.probabilities[i] > pool.probabilities[i + 1])
            throw Error(ErrorCode::PARSE_ERROR, "pool probabilities inconsistent with logits");
        if (pool.logits[i] > pool.logits[i + 1] && pool.probabilities[i] < pool.probabilities[i + 1])
            throw Error(ErrorCode::PARSE_ERROR, "pool probabilities inconsistent with logits");
    }
}

void validate_record(const ScoreRecord& record, std::size_t pool_size) {
    if (record.candidate_scores.size() != pool_size)
        throw Error(ErrorCode::LENGTH_MISMATCH, "score record length does not match pool");
    if (!std::isfinite(record.original_score))
        throw Error(ErrorCode::BACKEND_FAILURE, "non-finite original score");
    for (double s : record.candidate_scores)
        if (!std::isfinite(s)) throw Error(ErrorCode::BACKEND_FAILURE, "non-finite candidate score");
}

}  // namespace sws

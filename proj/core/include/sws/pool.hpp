#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sws/sentence.hpp"

namespace sws {

// Ordered substitute candidates for one token site. Candidates are sorted by
// descending logit; probabilities come from the model's normalization set
// (the admissible vocabulary, not just the pool), so they compare directly
// against `original_probability`.
struct CandidatePool {
    TokenSite site;
    std::vector<std::string> candidates;
    std::vector<double> logits;
    std::vector<double> probabilities;
    std::optional<double> original_probability;

    std::size_t size() const { return candidates.size(); }
};

// Validates the shared length/ordering invariants; throws on violation.
void validate_pool(const CandidatePool& pool);

// Sentence-quality scores for one pool: the score of each modified sentence
// plus the score of the unmodified original.
struct ScoreRecord {
    double original_score = 0.0;
    std::vector<double> candidate_scores;
    std::string scorer_id;
};

void validate_record(const ScoreRecord& record, std::size_t pool_size);

enum class Action { REPLACE, KEEP };

// Outcome of the substitution rule at one site.
struct SubstitutionDecision {
    TokenSite site;
    Action action = Action::KEEP;
    std::optional<std::string> replacement;
    double chosen_probability = 0.0;
    double original_probability = 0.0;
};

// A token site together with what human annotators suggested for it (possibly
// nothing) and what the model decided. Input to the stratification report.
struct AnnotatedToken {
    TokenSite site;
    std::set<std::string> annotator_suggestions;
    SubstitutionDecision model_decision;
};

}  // namespace sws

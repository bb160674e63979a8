#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sws/candidates.hpp"
#include "sws/pool.hpp"

namespace sws::subst {

// The substitution rule: replace with the most probable candidate iff its
// probability strictly exceeds the original token's and it is a different
// word; exact ties keep the original. The replacement inherits the original
// token's leading-capital pattern.
SubstitutionDecision decide(const CandidatePool& pool);

// Second-best substitute: the second-highest-probability candidate distinct
// from the original token, when at least two such candidates exist.
std::optional<std::string> top2(const CandidatePool& pool);

struct Suggestion {
    TokenSite site;
    SubstitutionDecision decision;
    CandidatePool pool;
};

// Per-sentence pass: sample sites per the plan, build a pool and decide at
// each; results follow token order.
std::vector<Suggestion> suggest(const Sentence& sentence, const SubstitutionModel& model,
                                const SamplingPlan& plan);

// JSON-lines record per site:
// {"sentence_id":…, "position":…, "original":…, "action":"replace"|"keep",
//  "replacement":…|null, "candidates":[{"token":…, "prob":…}]}
void write_suggestions(std::ostream& os, const std::string& sentence_id,
                       const std::vector<Suggestion>& suggestions);

}  // namespace sws::subst

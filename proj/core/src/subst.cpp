#include "sws/subst.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <ostream>

#include "sws/error.hpp"

namespace sws::subst {

SubstitutionDecision decide(const CandidatePool& pool) {
    if (!pool.original_probability)
        throw Error(ErrorCode::MISSING_ORIGINAL_PROB,
                    "pool lacks the original token's probability");

    SubstitutionDecision out;
    out.site = pool.site;
    out.original_probability = *pool.original_probability;
    out.action = Action::KEEP;
    out.chosen_probability = out.original_probability;
    if (pool.candidates.empty()) return out;

    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i)
        if (pool.probabilities[i] > pool.probabilities[best]) best = i;

    out.chosen_probability = pool.probabilities[best];

    const std::string original_folded = ascii_lower(pool.site.original_token);
    const bool differs = ascii_lower(pool.candidates[best]) != original_folded;
    if (differs && pool.probabilities[best] > out.original_probability) {
        out.action = Action::REPLACE;
        out.replacement = match_capitalization(pool.site.original_token, pool.candidates[best]);
    }
    return out;
}

std::optional<std::string> top2(const CandidatePool& pool) {
    const std::string original_folded = ascii_lower(pool.site.original_token);

    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool.probabilities[a] > pool.probabilities[b];
    });

    std::vector<std::size_t> substitutes;
    for (auto i : order)
        if (ascii_lower(pool.candidates[i]) != original_folded) substitutes.push_back(i);

    if (substitutes.size() < 2) return std::nullopt;
    return pool.candidates[substitutes[1]];
}

std::vector<Suggestion> suggest(const Sentence& sentence, const SubstitutionModel& model,
                                const SamplingPlan& plan) {
    const auto sites = sample_token_sites(sentence, plan, default_eligibility(model));

    std::vector<Suggestion> out;
    out.reserve(sites.size());
    for (const auto& site : sites) {
        Suggestion s;
        s.site = site;
        s.pool = build_candidate_pool(model, site, plan.pool_size);
        s.decision = decide(s.pool);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(),
              [](const Suggestion& a, const Suggestion& b) { return a.site.position < b.site.position; });
    return out;
}

void write_suggestions(std::ostream& os, const std::string& sentence_id,
                       const std::vector<Suggestion>& suggestions) {
    using nlohmann::json;
    for (const auto& s : suggestions) {
        json candidates = json::array();
        for (std::size_t i = 0; i < s.pool.size(); ++i)
            candidates.push_back({{"token", s.pool.candidates[i]},
                                  {"prob", s.pool.probabilities[i]}});
        json rec{{"sentence_id", sentence_id},
                 {"position", s.site.position},
                 {"original", s.site.original_token},
                 {"action", s.decision.action == Action::REPLACE ? "replace" : "keep"},
                 {"replacement",
                  s.decision.replacement ? json(*s.decision.replacement) : json(nullptr)},
                 {"candidates", candidates}};
        os << rec.dump() << '\n';
    }
}

}  // namespace sws::subst

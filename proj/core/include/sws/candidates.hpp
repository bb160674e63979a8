#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sws/models/vocab.hpp"
#include "sws/pool.hpp"
#include "sws/sentence.hpp"

namespace sws {

// A model that fills a masked token site with a distribution over its
// vocabulary. Implemented by the bundled masked LM and by test stubs.
class SubstitutionModel {
  public:
    virtual ~SubstitutionModel() = default;
    virtual std::vector<double> masked_logits(const Sentence& sentence,
                                              std::size_t position) const = 0;
    virtual const models::Vocab& vocab() const = 0;
};

struct SamplingPlan {
    std::size_t sites_per_sentence = 5;
    std::size_t pool_size = 5;  // K
    std::uint64_t rng_seed = 0;
    std::string eligibility_filter = "default";
};

using SitePredicate = std::function<bool(const Sentence&, std::size_t)>;

// Default eligibility: alphabetic whole words of length >= 2 that are single
// vocabulary items. Punctuation, numbers and out-of-vocabulary words are out.
SitePredicate default_eligibility(const SubstitutionModel& model);

std::vector<std::size_t> eligible_positions(const Sentence& sentence, const SitePredicate& pred);

// Uniform sample without replacement among eligible sites, clamped to what is
// available. The sentence text is folded into the seed so results do not
// depend on iteration order across a corpus.
std::vector<TokenSite> sample_token_sites(const Sentence& sentence, const SamplingPlan& plan,
                                          const SitePredicate& eligible);

// Masks the site, reads the model distribution, keeps the top-K admissible
// vocabulary items (no specials, no punctuation-only or single-letter
// entries). Probabilities are normalized over the full admissible vocabulary
// so they compare directly with the original token's probability, which is
// recorded alongside. Returns fewer than K items when the vocabulary is
// exhausted.
CandidatePool build_candidate_pool(const SubstitutionModel& model, const TokenSite& site,
                                   std::size_t k);

// True for vocabulary entries a pool may contain.
bool admissible_candidate(const std::string& word);

}  // namespace sws

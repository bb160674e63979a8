#include "sws/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sws/error.hpp"
#include "sws/models/nn.hpp"

namespace sws {

bool admissible_candidate(const std::string& word) {
    return word.size() >= 2 && is_alphabetic_word(word);
}

SitePredicate default_eligibility(const SubstitutionModel& model) {
    const models::Vocab* vocab = &model.vocab();
    return [vocab](const Sentence& sentence, std::size_t pos) {
        if (pos >= sentence.tokens.size()) return false;
        const auto& tok = sentence.tokens[pos];
        if (!is_alphabetic_word(tok) || tok.size() < 2) return false;
        return vocab->contains(tok);  // single vocabulary items only
    };
}

std::vector<std::size_t> eligible_positions(const Sentence& sentence, const SitePredicate& pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
        if (pred(sentence, i)) out.push_back(i);
    return out;
}

std::vector<TokenSite> sample_token_sites(const Sentence& sentence, const SamplingPlan& plan,
                                          const SitePredicate& eligible) {
    auto positions = eligible_positions(sentence, eligible);
    if (positions.empty())
        throw Error(ErrorCode::NO_ELIGIBLE_SITES, "no eligible token sites in sentence");

    models::Rng rng(models::mix_seed(plan.rng_seed, models::fnv1a(sentence.text)));
    const std::size_t take = std::min(plan.sites_per_sentence, positions.size());

    // partial Fisher-Yates: the first `take` entries are a uniform sample
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_below(positions.size() - i);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(take);
    std::sort(positions.begin(), positions.end());

    std::vector<TokenSite> sites;
    sites.reserve(take);
    for (auto pos : positions) sites.push_back(make_site(sentence, pos));
    return sites;
}

CandidatePool build_candidate_pool(const SubstitutionModel& model, const TokenSite& site,
                                   std::size_t k) {
    if (site.sentence == nullptr) throw Error(ErrorCode::BAD_SITE, "site has no sentence");

    std::vector<double> logits;
    try {
        logits = model.masked_logits(*site.sentence, site.position);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::MODEL_FAILURE, e.what());
    }

    const auto& vocab = model.vocab();
    if (logits.size() != vocab.size())
        throw Error(ErrorCode::MODEL_FAILURE, "model logits do not cover the vocabulary");

    std::vector<int> admissible;
    admissible.reserve(vocab.size());
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        if (vocab.is_special(static_cast<int>(id))) continue;
        if (!admissible_candidate(vocab.word(static_cast<int>(id)))) continue;
        admissible.push_back(static_cast<int>(id));
    }
    if (admissible.empty()) throw Error(ErrorCode::MODEL_FAILURE, "vocabulary has no admissible words");

    // softmax over the admissible vocabulary: candidate and original-token
    // probabilities share one scale
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int id : admissible) max_logit = std::max(max_logit, logits[static_cast<std::size_t>(id)]);
    double z = 0.0;
    for (int id : admissible) z += std::exp(logits[static_cast<std::size_t>(id)] - max_logit);

    auto prob_of = [&](int id) {
        return std::exp(logits[static_cast<std::size_t>(id)] - max_logit) / z;
    };

    // top-K by logit, ties by lower id
    std::vector<int> order = admissible;
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](int a, int b) {
                          const double la = logits[static_cast<std::size_t>(a)];
                          const double lb = logits[static_cast<std::size_t>(b)];
                          if (la != lb) return la > lb;
                          return a < b;
                      });

    CandidatePool pool;
    pool.site = site;
    pool.candidates.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const int id = order[i];
        pool.candidates.push_back(vocab.word(id));
        pool.logits.push_back(logits[static_cast<std::size_t>(id)]);
        pool.probabilities.push_back(prob_of(id));
    }

    const int original_id = vocab.id(site.original_token);
    if (original_id != models::Vocab::kUnk &&
        std::find(admissible.begin(), admissible.end(), original_id) != admissible.end())
        pool.original_probability = prob_of(original_id);

    return pool;
}

}  // namespace sws

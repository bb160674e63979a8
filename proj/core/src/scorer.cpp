#include "sws/scorer.hpp"

#include <cmath>
#include <numeric>

#include "sws/error.hpp"
#include "sws/models/nn.hpp"

namespace sws {

std::string_view to_string(ScorerBackend backend) {
    return backend == ScorerBackend::SEQ2SEQ_LL ? "seq2seq_ll" : "causal_lm_prompted";
}

std::string_view to_string(Aggregation aggregation) {
    return aggregation == Aggregation::SUM ? "sum" : "mean";
}

void ScorerConfig::validate() const {
    if (backend == ScorerBackend::SEQ2SEQ_LL && prompt_template)
        throw Error(ErrorCode::CONFIG_INVALID, "seq2seq scorer takes no prompt template");
    if (backend == ScorerBackend::CAUSAL_LM_PROMPTED && !prompt_template)
        throw Error(ErrorCode::CONFIG_INVALID, "prompted scorer requires a prompt template");
}

std::string fill_prompt_template(std::string_view prompt_template, const std::string& original,
                                 const std::string& modified) {
    std::string out(prompt_template);
    auto replace_one = [&out](std::string_view placeholder, const std::string& value) {
        const auto pos = out.find(placeholder);
        if (pos == std::string::npos)
            throw Error(ErrorCode::CONFIG_INVALID,
                        "prompt template missing placeholder " + std::string(placeholder));
        out.replace(pos, placeholder.size(), value);
    };
    replace_one(kOriginalPlaceholder, original);
    replace_one(kModifiedPlaceholder, modified);
    return out;
}

Seq2SeqScoreBackend::Seq2SeqScoreBackend(std::shared_ptr<const models::TinySeq2Seq> model)
    : model_(std::move(model)) {
    if (!model_) throw Error(ErrorCode::BACKEND_FAILURE, "null seq2seq model");
}

std::vector<double> Seq2SeqScoreBackend::token_log_probs(const std::string& original,
                                                         const std::string& modified) const {
    const auto src = model_->vocab().ids(tokenize(original));
    const auto tgt = model_->vocab().ids(tokenize(modified));
    return model_->target_log_probs(src, tgt);
}

std::string Seq2SeqScoreBackend::weights_fingerprint() const {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(model_->param_hash()));
    return buf;
}

CausalPromptedScoreBackend::CausalPromptedScoreBackend(
    std::shared_ptr<const models::TinyCausalLM> model, std::string prompt_template)
    : model_(std::move(model)), template_(std::move(prompt_template)) {
    if (!model_) throw Error(ErrorCode::BACKEND_FAILURE, "null causal model");
    if (template_.find(kOriginalPlaceholder) == std::string::npos ||
        template_.find(kModifiedPlaceholder) == std::string::npos)
        throw Error(ErrorCode::CONFIG_INVALID, "prompt template lacks required placeholders");
}

std::vector<double> CausalPromptedScoreBackend::token_log_probs(
    const std::string& original, const std::string& modified) const {
    // The modified text sits at the tail of the filled prompt; prefix length
    // in tokens marks where its region begins.
    const auto marker = template_.find(kModifiedPlaceholder);
    std::string prefix_text = template_.substr(0, marker);
    auto replace_original = [&](std::string& s) {
        const auto pos = s.find(kOriginalPlaceholder);
        if (pos != std::string::npos) s.replace(pos, kOriginalPlaceholder.size(), original);
    };
    replace_original(prefix_text);

    std::string full_text = fill_prompt_template(template_, original, modified);

    const auto prefix_ids = model_->vocab().ids(tokenize(prefix_text));
    const auto full_ids = model_->vocab().ids(tokenize(full_text));
    if (full_ids.size() <= prefix_ids.size())
        throw Error(ErrorCode::BACKEND_FAILURE, "prompted region is empty");
    return model_->span_log_probs(full_ids, prefix_ids.size());
}

std::string CausalPromptedScoreBackend::weights_fingerprint() const {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(model_->param_hash()));
    return buf;
}

Scorer::Scorer(std::shared_ptr<const ScoreBackendImpl> backend, ScorerConfig config,
               std::shared_ptr<ScoreCache> cache)
    : backend_(std::move(backend)), config_(std::move(config)), cache_(std::move(cache)) {
    if (!backend_) throw Error(ErrorCode::BACKEND_FAILURE, "scorer backend missing");
    config_.validate();
    // aggregation and weights are part of the identity so cached values never mix
    scorer_id_ = std::string(to_string(config_.backend)) + "|" + config_.model_id + ":" +
                 backend_->weights_fingerprint() + "|" + std::string(to_string(config_.aggregation));
    if (config_.prompt_template) {
        char buf[19];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(models::fnv1a(*config_.prompt_template)));
        scorer_id_ += std::string("|p:") + buf;
    }
}

double Scorer::compute(const std::string& original, const std::string& modified) const {
    const auto log_probs = backend_->token_log_probs(original, modified);
    if (log_probs.empty()) throw Error(ErrorCode::BACKEND_FAILURE, "backend returned no tokens");
    double sum = std::accumulate(log_probs.begin(), log_probs.end(), 0.0);
    if (config_.aggregation == Aggregation::MEAN)
        sum /= static_cast<double>(log_probs.size());
    if (!std::isfinite(sum)) throw Error(ErrorCode::BACKEND_FAILURE, "non-finite score");
    return sum;
}

double Scorer::score(const Sentence& original, const Sentence& modified) const {
    if (original.tokens.empty() || modified.tokens.empty())
        throw Error(ErrorCode::EMPTY_TEXT, "cannot score empty sentences");

    if (cache_) {
        if (auto hit = cache_->lookup(scorer_id_, original.text, modified.text)) return *hit;
    }
    const double value = compute(original.text, modified.text);
    if (cache_) cache_->store(scorer_id_, original.text, modified.text, value);
    return value;
}

std::vector<double> Scorer::score_batch(const Sentence& original,
                                        const std::vector<Sentence>& modified) const {
    if (modified.empty()) throw Error(ErrorCode::EMPTY_INPUT, "empty batch");
    std::vector<double> out;
    out.reserve(modified.size());
    for (const auto& m : modified) out.push_back(score(original, m));
    return out;
}

double Scorer::gptscore_paraphrase(const Sentence& original, const Sentence& modified) const {
    if (config_.backend != ScorerBackend::CAUSAL_LM_PROMPTED)
        throw Error(ErrorCode::CONFIG_INVALID, "paraphrase score needs the prompted backend");
    if (!config_.prompt_template || *config_.prompt_template != kGptScoreParaphraseTemplate)
        throw Error(ErrorCode::CONFIG_INVALID, "paraphrase score requires the canonical template");
    return score(original, modified);
}

}  // namespace sws

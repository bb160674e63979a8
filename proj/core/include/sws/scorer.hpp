#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sws/models/causal_lm.hpp"
#include "sws/models/seq2seq.hpp"
#include "sws/score_cache.hpp"
#include "sws/sentence.hpp"

namespace sws {

enum class ScorerBackend { SEQ2SEQ_LL, CAUSAL_LM_PROMPTED };
enum class Aggregation { SUM, MEAN };

// Paraphrase prompt for the causal-LM score; only the modified-sentence
// region is scored.
inline constexpr std::string_view kGptScoreParaphraseTemplate =
    "Rewrite the following text with the same semantics. {original sentence} In other words, "
    "{the modified sentence}";
inline constexpr std::string_view kOriginalPlaceholder = "{original sentence}";
inline constexpr std::string_view kModifiedPlaceholder = "{the modified sentence}";

struct ScorerConfig {
    ScorerBackend backend = ScorerBackend::SEQ2SEQ_LL;
    std::string model_id;
    Aggregation aggregation = Aggregation::SUM;  // SUM is the literal definition
    std::optional<std::string> prompt_template;  // required for CAUSAL_LM_PROMPTED

    void validate() const;
};

// Produces the per-token log-likelihoods behind a score. Implementations must
// be deterministic for fixed weights.
class ScoreBackendImpl {
  public:
    virtual ~ScoreBackendImpl() = default;
    virtual std::vector<double> token_log_probs(const std::string& original,
                                                const std::string& modified) const = 0;
    virtual std::string weights_fingerprint() const = 0;
};

class Seq2SeqScoreBackend final : public ScoreBackendImpl {
  public:
    explicit Seq2SeqScoreBackend(std::shared_ptr<const models::TinySeq2Seq> model);
    std::vector<double> token_log_probs(const std::string& original,
                                        const std::string& modified) const override;
    std::string weights_fingerprint() const override;
    const models::TinySeq2Seq& model() const { return *model_; }

  private:
    std::shared_ptr<const models::TinySeq2Seq> model_;
};

class CausalPromptedScoreBackend final : public ScoreBackendImpl {
  public:
    CausalPromptedScoreBackend(std::shared_ptr<const models::TinyCausalLM> model,
                               std::string prompt_template);
    std::vector<double> token_log_probs(const std::string& original,
                                        const std::string& modified) const override;
    std::string weights_fingerprint() const override;
    const models::TinyCausalLM& model() const { return *model_; }

  private:
    std::shared_ptr<const models::TinyCausalLM> model_;
    std::string template_;
};

// Sentence-quality scorer: sum (or token mean) of conditional log-likelihoods
// of the modified sentence given the original. Deterministic, cached by
// (scorer_id, original text, modified text).
class Scorer {
  public:
    Scorer(std::shared_ptr<const ScoreBackendImpl> backend, ScorerConfig config,
           std::shared_ptr<ScoreCache> cache = nullptr);

    double score(const Sentence& original, const Sentence& modified) const;
    std::vector<double> score_batch(const Sentence& original,
                                    const std::vector<Sentence>& modified) const;

    // The paraphrase-prompted causal-LM score; requires the exact template.
    double gptscore_paraphrase(const Sentence& original, const Sentence& modified) const;

    const std::string& scorer_id() const { return scorer_id_; }
    const ScorerConfig& config() const { return config_; }
    std::shared_ptr<ScoreCache> cache() const { return cache_; }

  private:
    std::shared_ptr<const ScoreBackendImpl> backend_;
    ScorerConfig config_;
    std::shared_ptr<ScoreCache> cache_;
    std::string scorer_id_;

    double compute(const std::string& original, const std::string& modified) const;
};

std::string fill_prompt_template(std::string_view prompt_template, const std::string& original,
                                 const std::string& modified);

std::string_view to_string(ScorerBackend backend);
std::string_view to_string(Aggregation aggregation);

}  // namespace sws

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sws/data.hpp"
#include "sws/losses.hpp"
#include "sws/models/masked_lm.hpp"
#include "sws/scorer.hpp"

namespace sws::train {

enum class LossMode { CE, MR, MR_AS, MR_BS, DPO, DPO_STAR, SIGMA_DPO_STAR };

LossMode parse_loss_mode(std::string_view name);
std::string_view to_string(LossMode mode);
bool needs_reference(LossMode mode);

// Defaults follow the published fine-tuning recipe. The literal gradient-clip
// norm of 1e-5 is tiny relative to the learning rate and nearly freezes
// updates; kGradClipSmoke is the preset the smoke runs use instead.
struct TrainConfig {
    LossMode loss_mode = LossMode::MR_AS;
    std::size_t epochs = 5;
    std::size_t batch_size = 64;
    double learning_rate = 0.0007;
    double grad_clip_max_norm = 1e-5;
    double dropout_rate = 0.1;
    double lambda_margin = 0.5;
    double gamma_mix = 1.0;
    double dpo_scale = 1.0;
    std::size_t sites_per_sentence = 5;
    std::size_t pool_size = 5;
    std::size_t corpus_sample = 100000;
    std::uint64_t rng_seed = 0;
    std::size_t heldout_eval_every = 0;  // extra CS probes every N steps; 0 = epoch ends only

    void validate() const;
};

inline constexpr double kGradClipSmoke = 1.0;

// Frozen deep copy of the policy at initialization; supplies the reference
// logits for the preference losses and never changes afterwards.
class ReferenceModel {
  public:
    explicit ReferenceModel(const models::TinyMaskedLM& policy);
    const models::TinyMaskedLM& model() const { return model_; }
    std::uint64_t param_hash() const { return model_.param_hash(); }

  private:
    models::TinyMaskedLM model_;
};

ReferenceModel freeze_reference(const models::TinyMaskedLM& policy);

struct StepResult {
    double loss_sum = 0.0;          // summed over sites
    std::size_t sites_used = 0;
    std::size_t sites_skipped = 0;  // pools with K < 2 under ranking losses
    Eigen::VectorXd grad_sum;       // summed site gradients
};

// One sentence's contribution: sample sites, build pools, score candidates,
// sort by score, evaluate the loss, and push gradients into the policy logits
// only. The scorer is a black box and receives no gradients.
StepResult make_training_step(const models::TinyMaskedLM& policy, const ReferenceModel* reference,
                              const Scorer& scorer, const Sentence& sentence,
                              const TrainConfig& config, std::uint64_t site_seed,
                              models::Rng* dropout_rng = nullptr);

struct StepLog {
    std::size_t step = 0;
    double loss = 0.0;
    std::optional<double> cs_heldout;
    double grad_norm = 0.0;  // post-clip
    std::size_t sites_used = 0;
    std::size_t sites_skipped = 0;
};

struct FineTuneResult {
    std::vector<std::filesystem::path> checkpoint_dirs;
    std::vector<StepLog> log;
};

// Epochs x batches of make_training_step with Adam and global-norm clipping.
// Sites are resampled each epoch (epoch index folded into the seed).
// Checkpoints land in out_dir/checkpoints/epoch-{n}/ as model.bin plus
// config.json and metrics.jsonl. A non-finite loss aborts with DIVERGENCE,
// retaining the last epoch checkpoint.
FineTuneResult fine_tune(models::TinyMaskedLM& policy, const Scorer& scorer,
                         const std::vector<data::DatasetRecord>& corpus,
                         const TrainConfig& config, const std::filesystem::path& out_dir,
                         std::span<const data::DatasetRecord> heldout = {});

void write_train_config(std::ostream& os, const TrainConfig& config);
TrainConfig read_train_config(std::istream& is);

}  // namespace sws::train

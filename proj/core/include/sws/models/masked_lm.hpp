#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>

#include "sws/candidates.hpp"
#include "sws/models/nn.hpp"
#include "sws/models/vocab.hpp"

namespace sws::models {

struct MaskedLmConfig {
    std::size_t window = 3;      // context tokens on each side of the mask
    std::size_t embed_dim = 24;
    std::size_t hidden_dim = 64;
};

// Masked whole-word model: the window of embeddings around a masked position
// feeds a tanh layer that predicts the masked token over the vocabulary.
// Parameters live in one flat vector (embeddings, W1, b1, W2, b2) so cloning,
// hashing, clipping and checkpointing stay trivial.
class TinyMaskedLM final : public SubstitutionModel {
  public:
    TinyMaskedLM(Vocab vocab, MaskedLmConfig config, std::uint64_t init_seed);

    std::vector<double> masked_logits(const Sentence& sentence,
                                      std::size_t position) const override;
    const Vocab& vocab() const override { return vocab_; }
    const MaskedLmConfig& config() const { return config_; }

    // Forward pass with cached activations for the backward pass. Dropout is
    // applied to the hidden layer only when an rng is supplied (training).
    struct Trace {
        std::vector<int> context;
        Eigen::VectorXd input;
        Eigen::VectorXd hidden;        // post-tanh, post-dropout
        Eigen::VectorXd dropout_mask;  // empty when dropout off
    };

    std::vector<int> context_ids(const Sentence& sentence, std::size_t position) const;
    Eigen::VectorXd forward(std::span<const int> context, Trace* trace = nullptr,
                            double dropout_rate = 0.0, Rng* rng = nullptr) const;

    // Accumulates parameter gradients for d loss / d logits given either a
    // sparse set of (vocab id, grad) pairs or a dense gradient.
    void backward(const Trace& trace, std::span<const std::pair<int, double>> dlogits,
                  Eigen::VectorXd& grad) const;
    void backward_dense(const Trace& trace, const Eigen::VectorXd& dlogits,
                        Eigen::VectorXd& grad) const;

    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& params() const { return params_; }
    std::uint64_t param_hash() const;

    // Standard masked-token cross-entropy over every in-vocabulary word site.
    void pretrain(std::span<const std::string> sentences, const PretrainOptions& options);

    void save(const std::filesystem::path& path) const;
    static TinyMaskedLM load(const std::filesystem::path& path);

  private:
    Vocab vocab_;
    MaskedLmConfig config_;
    Eigen::VectorXd params_;

    std::size_t input_dim() const { return 2 * config_.window * config_.embed_dim; }

    // flat-parameter views
    Eigen::Map<const Eigen::MatrixXd> embeddings() const;
    Eigen::Map<const Eigen::MatrixXd> w1() const;
    Eigen::Map<const Eigen::VectorXd> b1() const;
    Eigen::Map<const Eigen::MatrixXd> w2() const;
    Eigen::Map<const Eigen::VectorXd> b2() const;

    struct Offsets {
        std::size_t embed, w1, b1, w2, b2, total;
    };
    Offsets offsets() const;
};

}  // namespace sws::models

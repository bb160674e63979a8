#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <utility>

#include "sws/models/nn.hpp"
#include "sws/models/vocab.hpp"

namespace sws::models {

struct Seq2SeqConfig {
    std::size_t embed_dim = 24;
    std::size_t hidden_dim = 64;
    std::size_t max_positions = 256;
};

// Position-aligned encoder/decoder: each target step conditions on the
// previous target token and a three-token window of the source around the
// same position. Teacher-forced scoring therefore factorizes exactly into
// per-token conditionals, which is what the sentence scorer consumes.
class TinySeq2Seq {
  public:
    TinySeq2Seq(Vocab vocab, Seq2SeqConfig config, std::uint64_t init_seed);

    const Vocab& vocab() const { return vocab_; }
    const Seq2SeqConfig& config() const { return config_; }

    // Log-probability of each target token given the source and the target
    // prefix; one full-sequence matrix pass.
    std::vector<double> target_log_probs(std::span<const int> source,
                                         std::span<const int> target) const;

    // Distribution for a single decoding step; `step` is the 0-based index of
    // the token being predicted and `prev` the preceding target token (kBos
    // at step 0). Returns log-softmax over the vocabulary.
    Eigen::VectorXd step_log_probs(std::span<const int> source, int prev, std::size_t step) const;

    void pretrain(std::span<const std::pair<std::string, std::string>> pairs,
                  const PretrainOptions& options);

    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& params() const { return params_; }
    std::uint64_t param_hash() const;

    void save(const std::filesystem::path& path) const;
    static TinySeq2Seq load(const std::filesystem::path& path);

  private:
    Vocab vocab_;
    Seq2SeqConfig config_;
    Eigen::VectorXd params_;

    std::size_t input_dim() const { return 4 * config_.embed_dim; }

    struct Offsets {
        std::size_t src_embed, tgt_embed, w1, b1, w2, b2, total;
    };
    Offsets offsets() const;

    Eigen::Map<const Eigen::MatrixXd> src_embeddings() const;
    Eigen::Map<const Eigen::MatrixXd> tgt_embeddings() const;
    Eigen::Map<const Eigen::MatrixXd> w1() const;
    Eigen::Map<const Eigen::VectorXd> b1() const;
    Eigen::Map<const Eigen::MatrixXd> w2() const;
    Eigen::Map<const Eigen::VectorXd> b2() const;

    Eigen::VectorXd step_input(std::span<const int> source, int prev, std::size_t step) const;
    Eigen::MatrixXd sequence_inputs(std::span<const int> source, std::span<const int> target) const;
};

}  // namespace sws::models

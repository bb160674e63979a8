#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>

#include "sws/models/nn.hpp"
#include "sws/models/vocab.hpp"

namespace sws::models {

struct CausalLmConfig {
    std::size_t embed_dim = 24;
    std::size_t hidden_dim = 64;
    std::size_t max_positions = 512;
};

// Order-2 neural language model: each token is predicted from the embeddings
// of its two predecessors. Used as the prompted scorer backbone.
class TinyCausalLM {
  public:
    TinyCausalLM(Vocab vocab, CausalLmConfig config, std::uint64_t init_seed);

    const Vocab& vocab() const { return vocab_; }
    const CausalLmConfig& config() const { return config_; }

    // log-softmax distribution of the next token after (prev2, prev1)
    Eigen::VectorXd step_log_probs(int prev2, int prev1) const;

    // log-probabilities of ids[start..] conditioned on everything before them
    std::vector<double> span_log_probs(std::span<const int> ids, std::size_t start) const;

    void pretrain(std::span<const std::string> texts, const PretrainOptions& options);

    std::uint64_t param_hash() const;
    void save(const std::filesystem::path& path) const;
    static TinyCausalLM load(const std::filesystem::path& path);

  private:
    Vocab vocab_;
    CausalLmConfig config_;
    Eigen::VectorXd params_;

    std::size_t input_dim() const { return 2 * config_.embed_dim; }

    struct Offsets {
        std::size_t embed, w1, b1, w2, b2, total;
    };
    Offsets offsets() const;

    Eigen::Map<const Eigen::MatrixXd> embeddings() const;
    Eigen::Map<const Eigen::MatrixXd> w1() const;
    Eigen::Map<const Eigen::VectorXd> b1() const;
    Eigen::Map<const Eigen::MatrixXd> w2() const;
    Eigen::Map<const Eigen::VectorXd> b2() const;
};

}  // namespace sws::models

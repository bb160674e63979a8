#include "sws/models/causal_lm.hpp"

#include <cmath>
#include <fstream>

#include "sws/error.hpp"
#include "sws/sentence.hpp"

namespace sws::models {

namespace {
constexpr std::string_view kMagic = "SWSCLM1";
}

TinyCausalLM::TinyCausalLM(Vocab vocab, CausalLmConfig config, std::uint64_t init_seed)
    : vocab_(std::move(vocab)), config_(config) {
    const auto off = offsets();
    params_.resize(static_cast<Eigen::Index>(off.total));
    Rng rng(mix_seed(init_seed, 0x636c6dULL));
    for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = rng.normal(0.1);
    params_.segment(static_cast<Eigen::Index>(off.b1), static_cast<Eigen::Index>(config_.hidden_dim))
        .setZero();
    params_.segment(static_cast<Eigen::Index>(off.b2), static_cast<Eigen::Index>(vocab_.size()))
        .setZero();
}

TinyCausalLM::Offsets TinyCausalLM::offsets() const {
    const std::size_t v = vocab_.size();
    const std::size_t d = config_.embed_dim;
    const std::size_t h = config_.hidden_dim;
    Offsets off{};
    off.embed = 0;
    off.w1 = off.embed + v * d;
    off.b1 = off.w1 + h * input_dim();
    off.w2 = off.b1 + h;
    off.b2 = off.w2 + v * h;
    off.total = off.b2 + v;
    return off;
}

Eigen::Map<const Eigen::MatrixXd> TinyCausalLM::embeddings() const {
    const auto off = offsets();
    return {params_.data() + off.embed, static_cast<Eigen::Index>(config_.embed_dim),
            static_cast<Eigen::Index>(vocab_.size())};
}
Eigen::Map<const Eigen::MatrixXd> TinyCausalLM::w1() const {
    const auto off = offsets();
    return {params_.data() + off.w1, static_cast<Eigen::Index>(config_.hidden_dim),
            static_cast<Eigen::Index>(input_dim())};
}
Eigen::Map<const Eigen::VectorXd> TinyCausalLM::b1() const {
    const auto off = offsets();
    return {params_.data() + off.b1, static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::MatrixXd> TinyCausalLM::w2() const {
    const auto off = offsets();
    return {params_.data() + off.w2, static_cast<Eigen::Index>(vocab_.size()),
            static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::VectorXd> TinyCausalLM::b2() const {
    const auto off = offsets();
    return {params_.data() + off.b2, static_cast<Eigen::Index>(vocab_.size())};
}

Eigen::VectorXd TinyCausalLM::step_log_probs(int prev2, int prev1) const {
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    Eigen::VectorXd x(static_cast<Eigen::Index>(input_dim()));
    x.segment(0, d) = embeddings().col(prev2);
    x.segment(d, d) = embeddings().col(prev1);
    const Eigen::VectorXd h = (w1() * x + b1()).array().tanh().matrix();
    Eigen::VectorXd logits = w2() * h + b2();
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return (logits.array() - lse).matrix();
}

std::vector<double> TinyCausalLM::span_log_probs(std::span<const int> ids,
                                                 std::size_t start) const {
    if (ids.size() > config_.max_positions)
        throw Error(ErrorCode::LENGTH_OVERFLOW, "sequence exceeds scorer context window");
    if (start >= ids.size()) throw Error(ErrorCode::EMPTY_TEXT, "empty scored span");

    std::vector<double> out;
    out.reserve(ids.size() - start);
    for (std::size_t n = start; n < ids.size(); ++n) {
        const int prev1 = n >= 1 ? ids[n - 1] : Vocab::kBos;
        const int prev2 = n >= 2 ? ids[n - 2] : Vocab::kBos;
        out.push_back(step_log_probs(prev2, prev1)[ids[n]]);
    }
    return out;
}

std::uint64_t TinyCausalLM::param_hash() const {
    return fnv1a_bytes(params_.data(), sizeof(double) * static_cast<std::size_t>(params_.size()));
}

void TinyCausalLM::pretrain(std::span<const std::string> texts, const PretrainOptions& options) {
    Adam opt(options.learning_rate);
    const auto off = offsets();
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto h_dim = static_cast<Eigen::Index>(config_.hidden_dim);
    const auto v_dim = static_cast<Eigen::Index>(vocab_.size());

    std::vector<std::vector<int>> data;
    data.reserve(texts.size());
    for (const auto& t : texts) data.push_back(vocab_.ids(tokenize(t)));

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (const auto& ids : data) {
            if (ids.empty()) continue;
            grad.setZero();
            for (std::size_t n = 0; n < ids.size(); ++n) {
                const int prev1 = n >= 1 ? ids[n - 1] : Vocab::kBos;
                const int prev2 = n >= 2 ? ids[n - 2] : Vocab::kBos;

                Eigen::VectorXd x(static_cast<Eigen::Index>(input_dim()));
                x.segment(0, d) = embeddings().col(prev2);
                x.segment(d, d) = embeddings().col(prev1);
                const Eigen::VectorXd h = (w1() * x + b1()).array().tanh().matrix();
                Eigen::VectorXd logits = w2() * h + b2();

                Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
                p /= p.sum();
                p[ids[n]] -= 1.0;
                p /= static_cast<double>(ids.size());

                Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + off.w2, v_dim, h_dim);
                gw2.noalias() += p * h.transpose();
                grad.segment(static_cast<Eigen::Index>(off.b2), v_dim) += p;

                Eigen::VectorXd dh = w2().transpose() * p;
                Eigen::VectorXd dz = dh.cwiseProduct((1.0 - h.array().square()).matrix());
                Eigen::Map<Eigen::MatrixXd> gw1(grad.data() + off.w1, h_dim,
                                                static_cast<Eigen::Index>(input_dim()));
                gw1.noalias() += dz * x.transpose();
                grad.segment(static_cast<Eigen::Index>(off.b1), h_dim) += dz;

                const Eigen::VectorXd dx = w1().transpose() * dz;
                Eigen::Map<Eigen::MatrixXd> gemb(grad.data() + off.embed, d, v_dim);
                gemb.col(prev2) += dx.segment(0, d);
                gemb.col(prev1) += dx.segment(d, d);
            }
            opt.step(params_, grad);
        }
    }
}

void TinyCausalLM::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IO_ERROR, "cannot write " + path.string());
    write_string(os, kMagic);
    vocab_.save(os);
    write_u64(os, config_.embed_dim);
    write_u64(os, config_.hidden_dim);
    write_u64(os, config_.max_positions);
    write_vector(os, params_);
    if (!os) throw Error(ErrorCode::IO_ERROR, "short write to " + path.string());
}

TinyCausalLM TinyCausalLM::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    if (read_string(is) != kMagic)
        throw Error(ErrorCode::PARSE_ERROR, "not a causal-lm checkpoint: " + path.string());
    Vocab vocab = Vocab::load(is);
    CausalLmConfig config;
    config.embed_dim = read_u64(is);
    config.hidden_dim = read_u64(is);
    config.max_positions = read_u64(is);
    TinyCausalLM model(std::move(vocab), config, 0);
    model.params_ = read_vector(is);
    if (model.params_.size() != static_cast<Eigen::Index>(model.offsets().total))
        throw Error(ErrorCode::PARSE_ERROR, "checkpoint size mismatch");
    return model;
}

}  // namespace sws::models

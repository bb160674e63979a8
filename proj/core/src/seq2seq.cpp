#include "sws/models/seq2seq.hpp"

#include <cmath>
#include <fstream>

#include "sws/error.hpp"
#include "sws/sentence.hpp"

namespace sws::models {

namespace {
constexpr std::string_view kMagic = "SWSS2S1";

int source_at(std::span<const int> source, std::ptrdiff_t i) {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(source.size())) return Vocab::kPad;
    return source[static_cast<std::size_t>(i)];
}
}  // namespace

TinySeq2Seq::TinySeq2Seq(Vocab vocab, Seq2SeqConfig config, std::uint64_t init_seed)
    : vocab_(std::move(vocab)), config_(config) {
    const auto off = offsets();
    params_.resize(static_cast<Eigen::Index>(off.total));
    Rng rng(mix_seed(init_seed, 0x733273ULL));
    for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = rng.normal(0.1);
    params_.segment(static_cast<Eigen::Index>(off.b1), static_cast<Eigen::Index>(config_.hidden_dim))
        .setZero();
    params_.segment(static_cast<Eigen::Index>(off.b2), static_cast<Eigen::Index>(vocab_.size()))
        .setZero();
}

TinySeq2Seq::Offsets TinySeq2Seq::offsets() const {
    const std::size_t v = vocab_.size();
    const std::size_t d = config_.embed_dim;
    const std::size_t h = config_.hidden_dim;
    Offsets off{};
    off.src_embed = 0;
    off.tgt_embed = off.src_embed + v * d;
    off.w1 = off.tgt_embed + v * d;
    off.b1 = off.w1 + h * input_dim();
    off.w2 = off.b1 + h;
    off.b2 = off.w2 + v * h;
    off.total = off.b2 + v;
    return off;
}

Eigen::Map<const Eigen::MatrixXd> TinySeq2Seq::src_embeddings() const {
    const auto off = offsets();
    return {params_.data() + off.src_embed, static_cast<Eigen::Index>(config_.embed_dim),
            static_cast<Eigen::Index>(vocab_.size())};
}
Eigen::Map<const Eigen::MatrixXd> TinySeq2Seq::tgt_embeddings() const {
    const auto off = offsets();
    return {params_.data() + off.tgt_embed, static_cast<Eigen::Index>(config_.embed_dim),
            static_cast<Eigen::Index>(vocab_.size())};
}
Eigen::Map<const Eigen::MatrixXd> TinySeq2Seq::w1() const {
    const auto off = offsets();
    return {params_.data() + off.w1, static_cast<Eigen::Index>(config_.hidden_dim),
            static_cast<Eigen::Index>(input_dim())};
}
Eigen::Map<const Eigen::VectorXd> TinySeq2Seq::b1() const {
    const auto off = offsets();
    return {params_.data() + off.b1, static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::MatrixXd> TinySeq2Seq::w2() const {
    const auto off = offsets();
    return {params_.data() + off.w2, static_cast<Eigen::Index>(vocab_.size()),
            static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::VectorXd> TinySeq2Seq::b2() const {
    const auto off = offsets();
    return {params_.data() + off.b2, static_cast<Eigen::Index>(vocab_.size())};
}

Eigen::VectorXd TinySeq2Seq::step_input(std::span<const int> source, int prev,
                                        std::size_t step) const {
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto i = static_cast<std::ptrdiff_t>(step);
    Eigen::VectorXd x(static_cast<Eigen::Index>(input_dim()));
    x.segment(0, d) = tgt_embeddings().col(prev);
    x.segment(d, d) = src_embeddings().col(source_at(source, i - 1));
    x.segment(2 * d, d) = src_embeddings().col(source_at(source, i));
    x.segment(3 * d, d) = src_embeddings().col(source_at(source, i + 1));
    return x;
}

Eigen::MatrixXd TinySeq2Seq::sequence_inputs(std::span<const int> source,
                                             std::span<const int> target) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(input_dim()),
                      static_cast<Eigen::Index>(target.size()));
    for (std::size_t n = 0; n < target.size(); ++n) {
        const int prev = n == 0 ? Vocab::kBos : target[n - 1];
        x.col(static_cast<Eigen::Index>(n)) = step_input(source, prev, n);
    }
    return x;
}

Eigen::VectorXd TinySeq2Seq::step_log_probs(std::span<const int> source, int prev,
                                            std::size_t step) const {
    const Eigen::VectorXd x = step_input(source, prev, step);
    const Eigen::VectorXd h = (w1() * x + b1()).array().tanh().matrix();
    Eigen::VectorXd logits = w2() * h + b2();
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return (logits.array() - lse).matrix();
}

std::vector<double> TinySeq2Seq::target_log_probs(std::span<const int> source,
                                                  std::span<const int> target) const {
    if (target.empty()) throw Error(ErrorCode::EMPTY_TEXT, "empty target sequence");
    if (source.size() > config_.max_positions || target.size() > config_.max_positions)
        throw Error(ErrorCode::LENGTH_OVERFLOW, "sequence exceeds scorer context window");

    const Eigen::MatrixXd x = sequence_inputs(source, target);
    Eigen::MatrixXd h = ((w1() * x).colwise() + b1()).array().tanh().matrix();
    Eigen::MatrixXd logits = (w2() * h).colwise() + b2();

    std::vector<double> out(target.size());
    for (std::size_t n = 0; n < target.size(); ++n) {
        const auto col = logits.col(static_cast<Eigen::Index>(n));
        const double m = col.maxCoeff();
        const double lse = m + std::log((col.array() - m).exp().sum());
        out[n] = col[target[n]] - lse;
    }
    return out;
}

std::uint64_t TinySeq2Seq::param_hash() const {
    return fnv1a_bytes(params_.data(), sizeof(double) * static_cast<std::size_t>(params_.size()));
}

void TinySeq2Seq::pretrain(std::span<const std::pair<std::string, std::string>> pairs,
                           const PretrainOptions& options) {
    Adam opt(options.learning_rate);
    const auto off = offsets();
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto h_dim = static_cast<Eigen::Index>(config_.hidden_dim);
    const auto v_dim = static_cast<Eigen::Index>(vocab_.size());

    struct Encoded {
        std::vector<int> src, tgt;
    };
    std::vector<Encoded> data;
    data.reserve(pairs.size());
    for (const auto& [src_text, tgt_text] : pairs) {
        Encoded e;
        e.src = vocab_.ids(tokenize(src_text));
        e.tgt = vocab_.ids(tokenize(tgt_text));
        if (!e.tgt.empty()) data.push_back(std::move(e));
    }

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (const auto& e : data) {
            grad.setZero();
            const Eigen::MatrixXd x = sequence_inputs(e.src, e.tgt);
            const Eigen::MatrixXd h = ((w1() * x).colwise() + b1()).array().tanh().matrix();
            Eigen::MatrixXd logits = (w2() * h).colwise() + b2();

            // softmax CE gradient per step, averaged over the sequence
            Eigen::MatrixXd dlogits(v_dim, logits.cols());
            for (Eigen::Index n = 0; n < logits.cols(); ++n) {
                Eigen::VectorXd p =
                    (logits.col(n).array() - logits.col(n).maxCoeff()).exp().matrix();
                p /= p.sum();
                p[e.tgt[static_cast<std::size_t>(n)]] -= 1.0;
                dlogits.col(n) = p;
            }
            dlogits /= static_cast<double>(logits.cols());

            Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + off.w2, v_dim, h_dim);
            gw2.noalias() += dlogits * h.transpose();
            grad.segment(static_cast<Eigen::Index>(off.b2), v_dim) += dlogits.rowwise().sum();

            Eigen::MatrixXd dh = w2().transpose() * dlogits;
            Eigen::MatrixXd dz = dh.cwiseProduct((1.0 - h.array().square()).matrix());

            Eigen::Map<Eigen::MatrixXd> gw1(grad.data() + off.w1, h_dim,
                                            static_cast<Eigen::Index>(input_dim()));
            gw1.noalias() += dz * x.transpose();
            grad.segment(static_cast<Eigen::Index>(off.b1), h_dim) += dz.rowwise().sum();

            const Eigen::MatrixXd dx = w1().transpose() * dz;
            Eigen::Map<Eigen::MatrixXd> gsrc(grad.data() + off.src_embed, d, v_dim);
            Eigen::Map<Eigen::MatrixXd> gtgt(grad.data() + off.tgt_embed, d, v_dim);
            for (std::size_t n = 0; n < e.tgt.size(); ++n) {
                const auto col = static_cast<Eigen::Index>(n);
                const int prev = n == 0 ? Vocab::kBos : e.tgt[n - 1];
                const auto i = static_cast<std::ptrdiff_t>(n);
                gtgt.col(prev) += dx.col(col).segment(0, d);
                gsrc.col(source_at(e.src, i - 1)) += dx.col(col).segment(d, d);
                gsrc.col(source_at(e.src, i)) += dx.col(col).segment(2 * d, d);
                gsrc.col(source_at(e.src, i + 1)) += dx.col(col).segment(3 * d, d);
            }

            opt.step(params_, grad);
        }
    }
}

void TinySeq2Seq::save(const std::filesystem::path& path) const {
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

TinySeq2Seq TinySeq2Seq::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    if (read_string(is) != kMagic)
        throw Error(ErrorCode::PARSE_ERROR, "not a seq2seq checkpoint: " + path.string());
    Vocab vocab = Vocab::load(is);
    Seq2SeqConfig config;
    config.embed_dim = read_u64(is);
    config.hidden_dim = read_u64(is);
    config.max_positions = read_u64(is);
    TinySeq2Seq model(std::move(vocab), config, 0);
    model.params_ = read_vector(is);
    if (model.params_.size() != static_cast<Eigen::Index>(model.offsets().total))
        throw Error(ErrorCode::PARSE_ERROR, "checkpoint size mismatch");
    return model;
}

}  // namespace sws::models

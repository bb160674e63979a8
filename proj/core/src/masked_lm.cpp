#include "sws/models/masked_lm.hpp"

#include <cmath>
#include <fstream>

#include "sws/error.hpp"
#include "sws/losses.hpp"

namespace sws::models {

namespace {
constexpr std::string_view kMagic = "SWSMLM1";
}

TinyMaskedLM::TinyMaskedLM(Vocab vocab, MaskedLmConfig config, std::uint64_t init_seed)
    : vocab_(std::move(vocab)), config_(config) {
    const auto off = offsets();
    params_.resize(static_cast<Eigen::Index>(off.total));
    Rng rng(mix_seed(init_seed, 0x6d6c6dULL));
    const double scale = 0.1;
    for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = rng.normal(scale);
    // biases start at zero
    params_.segment(static_cast<Eigen::Index>(off.b1), static_cast<Eigen::Index>(config_.hidden_dim))
        .setZero();
    params_.segment(static_cast<Eigen::Index>(off.b2), static_cast<Eigen::Index>(vocab_.size()))
        .setZero();
}

TinyMaskedLM::Offsets TinyMaskedLM::offsets() const {
    const std::size_t v = vocab_.size();
    const std::size_t d = config_.embed_dim;
    const std::size_t h = config_.hidden_dim;
    const std::size_t in = input_dim();
    Offsets off{};
    off.embed = 0;
    off.w1 = off.embed + v * d;
    off.b1 = off.w1 + h * in;
    off.w2 = off.b1 + h;
    off.b2 = off.w2 + v * h;
    off.total = off.b2 + v;
    return off;
}

Eigen::Map<const Eigen::MatrixXd> TinyMaskedLM::embeddings() const {
    const auto off = offsets();
    return {params_.data() + off.embed, static_cast<Eigen::Index>(config_.embed_dim),
            static_cast<Eigen::Index>(vocab_.size())};
}
Eigen::Map<const Eigen::MatrixXd> TinyMaskedLM::w1() const {
    const auto off = offsets();
    return {params_.data() + off.w1, static_cast<Eigen::Index>(config_.hidden_dim),
            static_cast<Eigen::Index>(input_dim())};
}
Eigen::Map<const Eigen::VectorXd> TinyMaskedLM::b1() const {
    const auto off = offsets();
    return {params_.data() + off.b1, static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::MatrixXd> TinyMaskedLM::w2() const {
    const auto off = offsets();
    return {params_.data() + off.w2, static_cast<Eigen::Index>(vocab_.size()),
            static_cast<Eigen::Index>(config_.hidden_dim)};
}
Eigen::Map<const Eigen::VectorXd> TinyMaskedLM::b2() const {
    const auto off = offsets();
    return {params_.data() + off.b2, static_cast<Eigen::Index>(vocab_.size())};
}

std::vector<int> TinyMaskedLM::context_ids(const Sentence& sentence, std::size_t position) const {
    if (position >= sentence.tokens.size())
        throw Error(ErrorCode::BAD_SITE, "masked position out of range");
    const auto ids = vocab_.ids(sentence);
    const auto w = static_cast<std::ptrdiff_t>(config_.window);
    std::vector<int> ctx;
    ctx.reserve(2 * config_.window);
    const auto pos = static_cast<std::ptrdiff_t>(position);
    const auto n = static_cast<std::ptrdiff_t>(ids.size());
    for (std::ptrdiff_t i = pos - w; i <= pos + w; ++i) {
        if (i == pos) continue;  // the site itself is masked out
        ctx.push_back(i >= 0 && i < n ? ids[static_cast<std::size_t>(i)] : Vocab::kPad);
    }
    return ctx;
}

Eigen::VectorXd TinyMaskedLM::forward(std::span<const int> context, Trace* trace,
                                      double dropout_rate, Rng* rng) const {
    if (context.size() != 2 * config_.window)
        throw Error(ErrorCode::MODEL_FAILURE, "bad context width");

    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    Eigen::VectorXd x(static_cast<Eigen::Index>(input_dim()));
    const auto emb = embeddings();
    for (std::size_t i = 0; i < context.size(); ++i)
        x.segment(static_cast<Eigen::Index>(i) * d, d) = emb.col(context[i]);

    Eigen::VectorXd h = (w1() * x + b1()).array().tanh().matrix();

    Eigen::VectorXd mask;
    if (dropout_rate > 0.0 && rng != nullptr) {
        mask.resize(h.size());
        const double keep = 1.0 - dropout_rate;
        for (Eigen::Index i = 0; i < h.size(); ++i)
            mask[i] = rng->next_double() < dropout_rate ? 0.0 : 1.0 / keep;
        h = h.cwiseProduct(mask);
    }

    if (trace != nullptr) {
        trace->context.assign(context.begin(), context.end());
        trace->input = x;
        trace->hidden = h;
        trace->dropout_mask = mask;
    }
    return w2() * h + b2();
}

void TinyMaskedLM::backward(const Trace& trace, std::span<const std::pair<int, double>> dlogits,
                            Eigen::VectorXd& grad) const {
    if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
    const auto off = offsets();
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto h_dim = static_cast<Eigen::Index>(config_.hidden_dim);
    const auto in_dim = static_cast<Eigen::Index>(input_dim());

    // dh = W2^T dlogits over the touched rows only
    Eigen::VectorXd dh = Eigen::VectorXd::Zero(h_dim);
    const auto w2m = w2();
    for (const auto& [row, g] : dlogits) {
        dh += g * w2m.row(row).transpose();
        // dW2 row and db2
        Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + off.w2,
                                        static_cast<Eigen::Index>(vocab_.size()), h_dim);
        gw2.row(row) += g * trace.hidden.transpose();
        grad[static_cast<Eigen::Index>(off.b2) + row] += g;
    }

    if (trace.dropout_mask.size() > 0) dh = dh.cwiseProduct(trace.dropout_mask);

    // through tanh: hidden stored post-dropout; recover pre-dropout activation
    Eigen::VectorXd h_pre = trace.hidden;
    if (trace.dropout_mask.size() > 0) {
        for (Eigen::Index i = 0; i < h_pre.size(); ++i)
            h_pre[i] = trace.dropout_mask[i] > 0.0 ? h_pre[i] / trace.dropout_mask[i] : 0.0;
        // dropped units carry tanh values we no longer know, but their dh is 0
    }
    Eigen::VectorXd dz = dh.cwiseProduct((1.0 - h_pre.array().square()).matrix());

    Eigen::Map<Eigen::MatrixXd> gw1(grad.data() + off.w1, h_dim, in_dim);
    gw1.noalias() += dz * trace.input.transpose();
    grad.segment(static_cast<Eigen::Index>(off.b1), h_dim) += dz;

    Eigen::VectorXd dx = w1().transpose() * dz;
    Eigen::Map<Eigen::MatrixXd> gemb(grad.data() + off.embed, d,
                                     static_cast<Eigen::Index>(vocab_.size()));
    for (std::size_t i = 0; i < trace.context.size(); ++i)
        gemb.col(trace.context[i]) += dx.segment(static_cast<Eigen::Index>(i) * d, d);
}

void TinyMaskedLM::backward_dense(const Trace& trace, const Eigen::VectorXd& dlogits,
                                  Eigen::VectorXd& grad) const {
    if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
    const auto off = offsets();
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto h_dim = static_cast<Eigen::Index>(config_.hidden_dim);
    const auto in_dim = static_cast<Eigen::Index>(input_dim());
    const auto v_dim = static_cast<Eigen::Index>(vocab_.size());

    Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + off.w2, v_dim, h_dim);
    gw2.noalias() += dlogits * trace.hidden.transpose();
    grad.segment(static_cast<Eigen::Index>(off.b2), v_dim) += dlogits;

    Eigen::VectorXd dh = w2().transpose() * dlogits;
    if (trace.dropout_mask.size() > 0) dh = dh.cwiseProduct(trace.dropout_mask);

    Eigen::VectorXd h_pre = trace.hidden;
    if (trace.dropout_mask.size() > 0)
        for (Eigen::Index i = 0; i < h_pre.size(); ++i)
            h_pre[i] = trace.dropout_mask[i] > 0.0 ? h_pre[i] / trace.dropout_mask[i] : 0.0;
    Eigen::VectorXd dz = dh.cwiseProduct((1.0 - h_pre.array().square()).matrix());

    Eigen::Map<Eigen::MatrixXd> gw1(grad.data() + off.w1, h_dim, in_dim);
    gw1.noalias() += dz * trace.input.transpose();
    grad.segment(static_cast<Eigen::Index>(off.b1), h_dim) += dz;

    Eigen::VectorXd dx = w1().transpose() * dz;
    Eigen::Map<Eigen::MatrixXd> gemb(grad.data() + off.embed, d, v_dim);
    for (std::size_t i = 0; i < trace.context.size(); ++i)
        gemb.col(trace.context[i]) += dx.segment(static_cast<Eigen::Index>(i) * d, d);
}

std::vector<double> TinyMaskedLM::masked_logits(const Sentence& sentence,
                                                std::size_t position) const {
    const auto ctx = context_ids(sentence, position);
    const Eigen::VectorXd logits = forward(ctx);
    return {logits.data(), logits.data() + logits.size()};
}

std::uint64_t TinyMaskedLM::param_hash() const {
    return fnv1a_bytes(params_.data(), sizeof(double) * static_cast<std::size_t>(params_.size()));
}

void TinyMaskedLM::pretrain(std::span<const std::string> sentences,
                            const PretrainOptions& options) {
    Adam opt(options.learning_rate);
    Rng rng(mix_seed(options.seed, 0x70726574ULL));

    std::vector<Sentence> parsed;
    parsed.reserve(sentences.size());
    for (const auto& text : sentences) parsed.push_back(tokenize(text));

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (const auto& sentence : parsed) {
            grad.setZero();
            std::size_t sites = 0;
            for (std::size_t pos = 0; pos < sentence.tokens.size(); ++pos) {
                const int target = vocab_.id(sentence.tokens[pos]);
                if (target == Vocab::kUnk || !is_wordlike_token(sentence.tokens[pos])) continue;
                Trace trace;
                const auto ctx = context_ids(sentence, pos);
                Eigen::VectorXd logits =
                    forward(ctx, &trace, options.dropout_rate,
                            options.dropout_rate > 0.0 ? &rng : nullptr);
                // softmax cross-entropy gradient
                Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
                p /= p.sum();
                p[target] -= 1.0;
                backward_dense(trace, p, grad);
                ++sites;
            }
            if (sites == 0) continue;
            grad /= static_cast<double>(sites);
            opt.step(params_, grad);
        }
    }
}

void TinyMaskedLM::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IO_ERROR, "cannot write " + path.string());
    write_string(os, kMagic);
    vocab_.save(os);
    write_u64(os, config_.window);
    write_u64(os, config_.embed_dim);
    write_u64(os, config_.hidden_dim);
    write_vector(os, params_);
    if (!os) throw Error(ErrorCode::IO_ERROR, "short write to " + path.string());
}

TinyMaskedLM TinyMaskedLM::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    if (read_string(is) != kMagic)
        throw Error(ErrorCode::PARSE_ERROR, "not a masked-lm checkpoint: " + path.string());
    Vocab vocab = Vocab::load(is);
    MaskedLmConfig config;
    config.window = read_u64(is);
    config.embed_dim = read_u64(is);
    config.hidden_dim = read_u64(is);
    TinyMaskedLM model(std::move(vocab), config, 0);
    model.params_ = read_vector(is);
    if (model.params_.size() != static_cast<Eigen::Index>(model.offsets().total))
        throw Error(ErrorCode::PARSE_ERROR, "checkpoint size mismatch");
    return model;
}

}  // namespace sws::models

#include "sws/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "sws/error.hpp"
#include "sws/eval.hpp"
#include "sws/models/nn.hpp"

namespace sws::train {

using nlohmann::json;

LossMode parse_loss_mode(std::string_view name) {
    std::string lower(name);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "ce") return LossMode::CE;
    if (lower == "mr") return LossMode::MR;
    if (lower == "mr_as") return LossMode::MR_AS;
    if (lower == "mr_bs") return LossMode::MR_BS;
    if (lower == "dpo") return LossMode::DPO;
    if (lower == "dpo_star") return LossMode::DPO_STAR;
    if (lower == "sigma_dpo_star") return LossMode::SIGMA_DPO_STAR;
    throw Error(ErrorCode::CONFIG_INVALID, "unknown loss mode '" + std::string(name) + "'");
}

std::string_view to_string(LossMode mode) {
    switch (mode) {
        case LossMode::CE: return "ce";
        case LossMode::MR: return "mr";
        case LossMode::MR_AS: return "mr_as";
        case LossMode::MR_BS: return "mr_bs";
        case LossMode::DPO: return "dpo";
        case LossMode::DPO_STAR: return "dpo_star";
        case LossMode::SIGMA_DPO_STAR: return "sigma_dpo_star";
    }
    return "?";
}

bool needs_reference(LossMode mode) {
    return mode == LossMode::DPO || mode == LossMode::DPO_STAR ||
           mode == LossMode::SIGMA_DPO_STAR;
}

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || sites_per_sentence == 0 || pool_size == 0 ||
        corpus_sample == 0)
        throw Error(ErrorCode::CONFIG_INVALID, "training sizes must be positive");
    if (learning_rate < 0.0 || grad_clip_max_norm <= 0.0)
        throw Error(ErrorCode::CONFIG_INVALID, "bad optimizer settings");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw Error(ErrorCode::CONFIG_INVALID, "dropout must lie in [0,1)");
    if (lambda_margin < 0.0 || gamma_mix < 0.0 || dpo_scale <= 0.0)
        throw Error(ErrorCode::CONFIG_INVALID, "bad loss hyperparameters");
}

ReferenceModel::ReferenceModel(const models::TinyMaskedLM& policy) : model_(policy) {}

ReferenceModel freeze_reference(const models::TinyMaskedLM& policy) {
    try {
        return ReferenceModel(policy);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::COPY_FAILURE, e.what());
    }
}

namespace {

std::vector<double> logits_at(const models::TinyMaskedLM& model,
                              const models::TinyMaskedLM::Trace& trace,
                              const std::vector<int>& ids) {
    // reuse the trace's context through a plain forward to stay in eval mode
    const Eigen::VectorXd all = model.forward(trace.context);
    std::vector<double> out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = all[ids[i]];
    return out;
}

}  // namespace

StepResult make_training_step(const models::TinyMaskedLM& policy, const ReferenceModel* reference,
                              const Scorer& scorer, const Sentence& sentence,
                              const TrainConfig& config, std::uint64_t site_seed,
                              models::Rng* dropout_rng) {
    if (needs_reference(config.loss_mode) && reference == nullptr)
        throw Error(ErrorCode::MISSING_REFERENCE, "loss mode requires a frozen reference model");

    StepResult result;
    result.grad_sum = Eigen::VectorXd::Zero(policy.params().size());

    SamplingPlan plan;
    plan.sites_per_sentence = config.sites_per_sentence;
    plan.pool_size = config.pool_size;
    plan.rng_seed = site_seed;

    std::vector<TokenSite> sites;
    try {
        sites = sample_token_sites(sentence, plan, default_eligibility(policy));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NO_ELIGIBLE_SITES) return result;
        throw;
    }

    const double original_score = scorer.score(sentence, sentence);

    for (const auto& site : sites) {
        const auto pool = build_candidate_pool(policy, site, config.pool_size);
        const std::size_t k = pool.size();
        if (k == 0 || (k < 2 && config.loss_mode != LossMode::CE)) {
            ++result.sites_skipped;
            continue;
        }

        std::vector<Sentence> modified;
        modified.reserve(k);
        for (const auto& candidate : pool.candidates)
            modified.push_back(apply_substitution(sentence, site, candidate));
        const auto scores = scorer.score_batch(sentence, modified);

        std::vector<int> candidate_ids(k);
        for (std::size_t i = 0; i < k; ++i)
            candidate_ids[i] = policy.vocab().id(pool.candidates[i]);

        // training-mode forward (dropout) over the same site
        models::TinyMaskedLM::Trace trace;
        const auto context = policy.context_ids(sentence, site.position);
        const Eigen::VectorXd train_logits =
            policy.forward(context, &trace, dropout_rng ? config.dropout_rate : 0.0, dropout_rng);
        std::vector<double> pool_logits(k);
        for (std::size_t i = 0; i < k; ++i) pool_logits[i] = train_logits[candidate_ids[i]];

        const auto order = losses::ranking_order(pool_logits, scores);

        losses::LossBatch batch;
        batch.original_score = original_score;
        batch.margin_unit = config.lambda_margin;
        batch.mix_weight = config.gamma_mix;
        batch.dpo_scale = config.dpo_scale;
        batch.logits.resize(k);
        batch.scores.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            batch.logits[i] = pool_logits[order[i]];
            batch.scores[i] = scores[order[i]];
        }
        if (needs_reference(config.loss_mode)) {
            std::vector<int> sorted_ids(k);
            for (std::size_t i = 0; i < k; ++i) sorted_ids[i] = candidate_ids[order[i]];
            batch.ref_logits = logits_at(reference->model(), trace, sorted_ids);
        }

        losses::LossValue loss;
        switch (config.loss_mode) {
            case LossMode::CE: loss = losses::cross_entropy_best(batch.logits, 0); break;
            case LossMode::MR: loss = losses::margin_ranking_loss(batch); break;
            case LossMode::MR_AS:
                loss = losses::combined_loss(batch, losses::CombineMode::MR_AS);
                break;
            case LossMode::MR_BS:
                loss = losses::combined_loss(batch, losses::CombineMode::MR_BS);
                break;
            case LossMode::DPO:
                loss = losses::dpo_pl_loss(batch.logits, *batch.ref_logits, config.dpo_scale);
                break;
            case LossMode::DPO_STAR: loss = losses::dpo_star_loss(batch); break;
            case LossMode::SIGMA_DPO_STAR: loss = losses::sigma_dpo_star_loss(batch); break;
        }

        // undo the score ordering, then route into the vocabulary rows
        std::vector<std::pair<int, double>> dlogits;
        dlogits.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            if (loss.grad[i] != 0.0) dlogits.emplace_back(candidate_ids[order[i]], loss.grad[i]);
        policy.backward(trace, dlogits, result.grad_sum);

        result.loss_sum += loss.value;
        ++result.sites_used;
    }
    return result;
}

namespace {

void write_metrics_jsonl(const std::filesystem::path& path, std::span<const StepLog> log) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IO_ERROR, "cannot write " + path.string());
    for (const auto& entry : log) {
        json rec{{"step", entry.step},
                 {"loss", entry.loss},
                 {"cs_heldout", entry.cs_heldout ? json(*entry.cs_heldout) : json(nullptr)}};
        os << rec.dump() << '\n';
    }
}

}  // namespace

FineTuneResult fine_tune(models::TinyMaskedLM& policy, const Scorer& scorer,
                         const std::vector<data::DatasetRecord>& corpus,
                         const TrainConfig& config, const std::filesystem::path& out_dir,
                         std::span<const data::DatasetRecord> heldout) {
    config.validate();
    if (corpus.empty()) throw Error(ErrorCode::EMPTY_INPUT, "empty training corpus");

    const auto sample =
        data::sample_corpus(corpus, config.corpus_sample, models::mix_seed(config.rng_seed, 1));

    std::optional<ReferenceModel> reference;
    if (needs_reference(config.loss_mode)) reference.emplace(freeze_reference(policy));

    models::Adam optimizer(config.learning_rate);
    models::Rng dropout_rng(models::mix_seed(config.rng_seed, 0xd7089247ULL));

    SamplingPlan heldout_plan;
    heldout_plan.sites_per_sentence = config.sites_per_sentence;
    heldout_plan.pool_size = config.pool_size;
    heldout_plan.rng_seed = config.rng_seed;

    FineTuneResult result;
    std::filesystem::create_directories(out_dir / "checkpoints");

    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // resample site choices per epoch by folding the epoch into the seed
        const std::uint64_t epoch_seed = models::mix_seed(config.rng_seed, epoch);

        std::vector<std::size_t> order(sample.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        models::Rng shuffle_rng(models::mix_seed(epoch_seed, 0x5fa1eULL));
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const std::size_t j = i + shuffle_rng.uniform_below(order.size() - i);
            std::swap(order[i], order[j]);
        }

        for (std::size_t batch_start = 0; batch_start < order.size();
             batch_start += config.batch_size) {
            const std::size_t batch_end = std::min(batch_start + config.batch_size, order.size());

            Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.params().size());
            double loss_sum = 0.0;
            std::size_t sites_used = 0, sites_skipped = 0;
            for (std::size_t i = batch_start; i < batch_end; ++i) {
                const auto& record = sample[order[i]];
                const auto step_result =
                    make_training_step(policy, reference ? &*reference : nullptr, scorer,
                                       record.sentence, config, epoch_seed, &dropout_rng);
                loss_sum += step_result.loss_sum;
                sites_used += step_result.sites_used;
                sites_skipped += step_result.sites_skipped;
                if (step_result.sites_used > 0) grad += step_result.grad_sum;
            }

            ++step;
            StepLog entry;
            entry.step = step;
            entry.sites_used = sites_used;
            entry.sites_skipped = sites_skipped;
            entry.loss = sites_used > 0 ? loss_sum / static_cast<double>(sites_used) : 0.0;

            if (!std::isfinite(entry.loss)) {
                result.log.push_back(entry);
                throw Error(ErrorCode::DIVERGENCE,
                            "non-finite loss at step " + std::to_string(step) +
                                "; last epoch checkpoint retained");
            }

            if (sites_used > 0) {
                grad /= static_cast<double>(sites_used);
                const double pre_norm = models::clip_global_norm(grad, config.grad_clip_max_norm);
                entry.grad_norm = std::min(pre_norm, config.grad_clip_max_norm);
                optimizer.step(policy.params(), grad);
            }

            if (config.heldout_eval_every > 0 && !heldout.empty() &&
                step % config.heldout_eval_every == 0)
                entry.cs_heldout = eval::median_cs(policy, scorer, heldout, heldout_plan);

            result.log.push_back(entry);
        }

        if (!heldout.empty() && !result.log.empty() && !result.log.back().cs_heldout)
            result.log.back().cs_heldout = eval::median_cs(policy, scorer, heldout, heldout_plan);

        const auto ckpt = out_dir / "checkpoints" / ("epoch-" + std::to_string(epoch));
        std::filesystem::create_directories(ckpt);
        policy.save(ckpt / "model.bin");
        std::ofstream cfg(ckpt / "config.json");
        write_train_config(cfg, config);
        write_metrics_jsonl(ckpt / "metrics.jsonl", result.log);
        result.checkpoint_dirs.push_back(ckpt);
    }
    return result;
}

void write_train_config(std::ostream& os, const TrainConfig& config) {
    json doc{{"loss_mode", std::string(to_string(config.loss_mode))},
             {"epochs", config.epochs},
             {"batch_size", config.batch_size},
             {"learning_rate", config.learning_rate},
             {"grad_clip_max_norm", config.grad_clip_max_norm},
             {"dropout_rate", config.dropout_rate},
             {"lambda_margin", config.lambda_margin},
             {"gamma_mix", config.gamma_mix},
             {"dpo_scale", config.dpo_scale},
             {"sites_per_sentence", config.sites_per_sentence},
             {"pool_size", config.pool_size},
             {"corpus_sample", config.corpus_sample},
             {"rng_seed", config.rng_seed},
             {"heldout_eval_every", config.heldout_eval_every}};
    os << doc.dump(2) << '\n';
}

TrainConfig read_train_config(std::istream& is) {
    json doc = json::parse(is, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::PARSE_ERROR, "invalid train config JSON");
    TrainConfig config;
    config.loss_mode = parse_loss_mode(doc.at("loss_mode").get<std::string>());
    config.epochs = doc.at("epochs").get<std::size_t>();
    config.batch_size = doc.at("batch_size").get<std::size_t>();
    config.learning_rate = doc.at("learning_rate").get<double>();
    config.grad_clip_max_norm = doc.at("grad_clip_max_norm").get<double>();
    config.dropout_rate = doc.at("dropout_rate").get<double>();
    config.lambda_margin = doc.at("lambda_margin").get<double>();
    config.gamma_mix = doc.at("gamma_mix").get<double>();
    config.dpo_scale = doc.at("dpo_scale").get<double>();
    config.sites_per_sentence = doc.at("sites_per_sentence").get<std::size_t>();
    config.pool_size = doc.at("pool_size").get<std::size_t>();
    config.corpus_sample = doc.at("corpus_sample").get<std::size_t>();
    config.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    if (doc.contains("heldout_eval_every"))
        config.heldout_eval_every = doc.at("heldout_eval_every").get<std::size_t>();
    return config;
}

}  // namespace sws::train

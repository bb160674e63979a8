// sws: batch experiment runner for the word-substitution toolkit.
//
// Subcommands: make-corpus, pretrain, train, suggest, evaluate, stat, score,
// baseline-llm, report. Every run writes its reports plus a manifest
// (config hash, seeds, version) into --out.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "sws/data.hpp"
#include "sws/error.hpp"
#include "sws/eval.hpp"
#include "sws/llm.hpp"
#include "sws/metrics.hpp"
#include "sws/models/causal_lm.hpp"
#include "sws/models/masked_lm.hpp"
#include "sws/models/seq2seq.hpp"
#include "sws/report.hpp"
#include "sws/scorer.hpp"
#include "sws/stats.hpp"
#include "sws/subst.hpp"
#include "sws/synth.hpp"
#include "sws/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using sws::Error;
using sws::ErrorCode;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// configuration

struct Config {
    std::uint64_t seed = 0;

    struct Data {
        std::string path;
        std::string format = "sws";
        std::string heldout_path;
    } data;

    struct Model {
        std::string checkpoint;
    } model;

    struct ScorerSection {
        std::string backend = "seq2seq_ll";
        std::string checkpoint;
        std::string aggregation = "sum";
        std::optional<std::string> prompt_template;
        std::string cache;
        std::string model_id = "scorer";
    } scorer;

    struct Sampling {
        std::size_t sites_per_sentence = 5;
        std::size_t pool_size = 5;
    } sampling;

    sws::train::TrainConfig train;

    struct Stat {
        std::size_t k_s = 1000;
        double alpha = 0.01;
    } stat;

    struct Llm {
        std::string endpoint;
        std::string path = "/v1/chat/completions";
        std::string model;
        double temperature = 0.0;
        std::size_t max_retries = 5;
        double min_request_interval_s = 0.0;
        std::size_t max_concurrent = 4;
        bool ranked_prompt = false;
        std::string api_key_env = "SWS_LLM_API_KEY";
    } llm;

    struct Synth {
        std::size_t sentences = 300;
        std::size_t heldout = 50;
        std::size_t pairs_per_sentence = 4;
        double swap_probability = 0.6;
    } synth;

    struct Pretrain {
        std::string pairs_path;
        std::size_t mlm_epochs = 30;
        std::size_t seq2seq_epochs = 8;
        std::size_t causal_epochs = 6;
        double learning_rate = 0.01;
        std::size_t window = 3;
        std::size_t embed_dim = 24;
        std::size_t hidden_dim = 64;
    } pretrain;

    std::uint64_t file_hash = 0;
};

[[noreturn]] void config_fail(const std::string& what) {
    throw Error(ErrorCode::CONFIG_INVALID, what);
}

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) config_fail(std::string("unknown key '") + key + "' in section " + section);
    }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        config_fail(std::string("bad value for '") + key + "'");
    }
}

Config parse_config(const json& doc) {
    Config c;
    check_keys(doc, "top level",
               {"seed", "data", "model", "scorer", "sampling", "train", "stat", "llm", "synth",
                "pretrain"});
    read_into(doc, "seed", c.seed);

    if (doc.contains("data")) {
        const auto& d = doc["data"];
        check_keys(d, "data", {"path", "format", "heldout_path"});
        read_into(d, "path", c.data.path);
        read_into(d, "format", c.data.format);
        read_into(d, "heldout_path", c.data.heldout_path);
        sws::data::parse_format(c.data.format);  // validates
    }
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        check_keys(m, "model", {"checkpoint"});
        read_into(m, "checkpoint", c.model.checkpoint);
    }
    if (doc.contains("scorer")) {
        const auto& s = doc["scorer"];
        check_keys(s, "scorer",
                   {"backend", "checkpoint", "aggregation", "prompt_template", "cache",
                    "model_id"});
        read_into(s, "backend", c.scorer.backend);
        read_into(s, "checkpoint", c.scorer.checkpoint);
        read_into(s, "aggregation", c.scorer.aggregation);
        read_into(s, "cache", c.scorer.cache);
        read_into(s, "model_id", c.scorer.model_id);
        if (s.contains("prompt_template") && !s["prompt_template"].is_null())
            c.scorer.prompt_template = s["prompt_template"].get<std::string>();
        if (c.scorer.backend != "seq2seq_ll" && c.scorer.backend != "causal_lm_prompted")
            config_fail("scorer.backend must be seq2seq_ll or causal_lm_prompted");
        if (c.scorer.aggregation != "sum" && c.scorer.aggregation != "mean")
            config_fail("scorer.aggregation must be sum or mean");
    }
    if (doc.contains("sampling")) {
        const auto& s = doc["sampling"];
        check_keys(s, "sampling", {"sites_per_sentence", "pool_size"});
        read_into(s, "sites_per_sentence", c.sampling.sites_per_sentence);
        read_into(s, "pool_size", c.sampling.pool_size);
        if (c.sampling.sites_per_sentence == 0 || c.sampling.pool_size == 0)
            config_fail("sampling sizes must be positive");
    }
    if (doc.contains("train")) {
        const auto& t = doc["train"];
        check_keys(t, "train",
                   {"loss_mode", "epochs", "batch_size", "learning_rate", "grad_clip_max_norm",
                    "dropout_rate", "lambda_margin", "gamma_mix", "dpo_scale",
                    "sites_per_sentence", "pool_size", "corpus_sample", "heldout_eval_every"});
        if (t.contains("loss_mode"))
            c.train.loss_mode = sws::train::parse_loss_mode(t["loss_mode"].get<std::string>());
        read_into(t, "epochs", c.train.epochs);
        read_into(t, "batch_size", c.train.batch_size);
        read_into(t, "learning_rate", c.train.learning_rate);
        read_into(t, "grad_clip_max_norm", c.train.grad_clip_max_norm);
        read_into(t, "dropout_rate", c.train.dropout_rate);
        read_into(t, "lambda_margin", c.train.lambda_margin);
        read_into(t, "gamma_mix", c.train.gamma_mix);
        read_into(t, "dpo_scale", c.train.dpo_scale);
        read_into(t, "sites_per_sentence", c.train.sites_per_sentence);
        read_into(t, "pool_size", c.train.pool_size);
        read_into(t, "corpus_sample", c.train.corpus_sample);
        read_into(t, "heldout_eval_every", c.train.heldout_eval_every);
        try {
            c.train.validate();
        } catch (const Error& e) {
            config_fail(e.what());
        }
    }
    if (doc.contains("stat")) {
        const auto& s = doc["stat"];
        check_keys(s, "stat", {"k_s", "alpha"});
        read_into(s, "k_s", c.stat.k_s);
        read_into(s, "alpha", c.stat.alpha);
        if (c.stat.k_s < 2) config_fail("stat.k_s must be at least 2");
        if (!(c.stat.alpha > 0.0 && c.stat.alpha < 1.0)) config_fail("stat.alpha must be in (0,1)");
    }
    if (doc.contains("llm")) {
        const auto& l = doc["llm"];
        check_keys(l, "llm",
                   {"endpoint", "path", "model", "temperature", "max_retries",
                    "min_request_interval_s", "max_concurrent", "ranked_prompt", "api_key_env"});
        read_into(l, "endpoint", c.llm.endpoint);
        read_into(l, "path", c.llm.path);
        read_into(l, "model", c.llm.model);
        read_into(l, "temperature", c.llm.temperature);
        read_into(l, "max_retries", c.llm.max_retries);
        read_into(l, "min_request_interval_s", c.llm.min_request_interval_s);
        read_into(l, "max_concurrent", c.llm.max_concurrent);
        read_into(l, "ranked_prompt", c.llm.ranked_prompt);
        read_into(l, "api_key_env", c.llm.api_key_env);
    }
    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        check_keys(s, "synth", {"sentences", "heldout", "pairs_per_sentence", "swap_probability"});
        read_into(s, "sentences", c.synth.sentences);
        read_into(s, "heldout", c.synth.heldout);
        read_into(s, "pairs_per_sentence", c.synth.pairs_per_sentence);
        read_into(s, "swap_probability", c.synth.swap_probability);
    }
    if (doc.contains("pretrain")) {
        const auto& p = doc["pretrain"];
        check_keys(p, "pretrain",
                   {"pairs_path", "mlm_epochs", "seq2seq_epochs", "causal_epochs",
                    "learning_rate", "window", "embed_dim", "hidden_dim"});
        read_into(p, "pairs_path", c.pretrain.pairs_path);
        read_into(p, "mlm_epochs", c.pretrain.mlm_epochs);
        read_into(p, "seq2seq_epochs", c.pretrain.seq2seq_epochs);
        read_into(p, "causal_epochs", c.pretrain.causal_epochs);
        read_into(p, "learning_rate", c.pretrain.learning_rate);
        read_into(p, "window", c.pretrain.window);
        read_into(p, "embed_dim", c.pretrain.embed_dim);
        read_into(p, "hidden_dim", c.pretrain.hidden_dim);
    }
    return c;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scorer_cache;
    std::optional<std::size_t> k_s;
    std::optional<double> alpha;
};

Config load_config(const std::string& path, const Overrides& overrides) {
    Config c;
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) config_fail("cannot read config file " + path);
        std::ostringstream buffer;
        buffer << is.rdbuf();
        const std::string text = buffer.str();
        json doc = json::parse(text, nullptr, false);
        if (doc.is_discarded()) config_fail("config file is not valid JSON: " + path);
        c = parse_config(doc);
        c.file_hash = sws::models::fnv1a(text);
    }
    if (overrides.seed) c.seed = *overrides.seed;
    c.train.rng_seed = c.seed;
    if (overrides.scorer_cache) c.scorer.cache = *overrides.scorer_cache;
    if (overrides.k_s) c.stat.k_s = *overrides.k_s;
    if (overrides.alpha) c.stat.alpha = *overrides.alpha;
    return c;
}

// ---------------------------------------------------------------------------
// shared setup

void write_manifest(const fs::path& out, const std::string& command, const Config& c,
                    const std::string& config_path) {
    char hash_hex[19];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(c.file_hash));
    json doc{{"command", command},
             {"version", kVersion},
             {"config_path", config_path},
             {"config_hash", hash_hex},
             {"seed", c.seed},
             {"k_s", c.stat.k_s},
             {"alpha", c.stat.alpha}};
    std::ofstream os(out / "manifest.json");
    os << doc.dump(2) << '\n';
}

fs::path ensure_out(const std::string& out_dir) {
    fs::path out(out_dir.empty() ? "out" : out_dir);
    fs::create_directories(out);
    return out;
}

std::vector<sws::data::DatasetRecord> load_dataset(const Config& c) {
    if (c.data.path.empty()) config_fail("data.path is required for this command");
    return sws::data::load(c.data.path, sws::data::parse_format(c.data.format));
}

sws::models::TinyMaskedLM load_model(const Config& c) {
    if (c.model.checkpoint.empty()) config_fail("model.checkpoint is required for this command");
    return sws::models::TinyMaskedLM::load(c.model.checkpoint);
}

sws::Scorer make_scorer(const Config& c) {
    if (c.scorer.checkpoint.empty()) config_fail("scorer.checkpoint is required for this command");

    sws::ScorerConfig config;
    config.model_id = c.scorer.model_id;
    config.aggregation =
        c.scorer.aggregation == "mean" ? sws::Aggregation::MEAN : sws::Aggregation::SUM;

    std::shared_ptr<sws::ScoreCache> cache;
    if (!c.scorer.cache.empty()) cache = std::make_shared<sws::ScoreCache>(c.scorer.cache);

    if (c.scorer.backend == "seq2seq_ll") {
        config.backend = sws::ScorerBackend::SEQ2SEQ_LL;
        auto model = std::make_shared<sws::models::TinySeq2Seq>(
            sws::models::TinySeq2Seq::load(c.scorer.checkpoint));
        return sws::Scorer(std::make_shared<sws::Seq2SeqScoreBackend>(model), config, cache);
    }
    config.backend = sws::ScorerBackend::CAUSAL_LM_PROMPTED;
    config.prompt_template = c.scorer.prompt_template
                                 ? *c.scorer.prompt_template
                                 : std::string(sws::kGptScoreParaphraseTemplate);
    auto model = std::make_shared<sws::models::TinyCausalLM>(
        sws::models::TinyCausalLM::load(c.scorer.checkpoint));
    return sws::Scorer(
        std::make_shared<sws::CausalPromptedScoreBackend>(model, *config.prompt_template), config,
        cache);
}

sws::SamplingPlan make_plan(const Config& c) {
    sws::SamplingPlan plan;
    plan.sites_per_sentence = c.sampling.sites_per_sentence;
    plan.pool_size = c.sampling.pool_size;
    plan.rng_seed = c.seed;
    return plan;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_make_corpus(const Config& c, const fs::path& out) {
    sws::synth::SynthOptions options;
    options.n_sentences = c.synth.sentences + c.synth.heldout;
    if (c.seed != 0) options.seed = c.seed;
    options.pairs_per_sentence = c.synth.pairs_per_sentence;
    options.swap_probability = c.synth.swap_probability;
    const auto corpus = sws::synth::generate(options);

    std::vector<std::string> train_sentences(
        corpus.sentences.begin(),
        corpus.sentences.end() - static_cast<std::ptrdiff_t>(c.synth.heldout));
    std::vector<std::string> heldout_sentences(
        corpus.sentences.end() - static_cast<std::ptrdiff_t>(c.synth.heldout),
        corpus.sentences.end());

    {
        std::ofstream os(out / "corpus.jsonl");
        sws::data::write_canonical(os, sws::synth::as_records(train_sentences, "syn"));
    }
    {
        std::ofstream os(out / "heldout.jsonl");
        sws::data::write_canonical(os, sws::synth::as_records(heldout_sentences, "held"));
    }
    {
        std::ofstream os(out / "pairs.tsv");
        for (const auto& [src, tgt] : corpus.paraphrase_pairs) os << src << '\t' << tgt << '\n';
    }
    std::cout << "wrote " << train_sentences.size() << " training and "
              << heldout_sentences.size() << " held-out sentences, "
              << corpus.paraphrase_pairs.size() << " paraphrase pairs\n";
    return 0;
}

std::vector<std::pair<std::string, std::string>> load_pairs_tsv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) config_fail("cannot read pairs file " + path.string());
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(ErrorCode::PARSE_ERROR,
                        path.string() + ":" + std::to_string(lineno) + ": expected src\\ttgt");
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return pairs;
}

int cmd_pretrain(const Config& c, const fs::path& out) {
    const auto records = load_dataset(c);
    if (c.pretrain.pairs_path.empty()) config_fail("pretrain.pairs_path is required");
    const auto pairs = load_pairs_tsv(c.pretrain.pairs_path);

    std::vector<std::string> sentences;
    sentences.reserve(records.size());
    for (const auto& r : records) sentences.push_back(r.sentence.text);

    const auto vocab = sws::models::Vocab::build(sentences);
    std::cout << "vocabulary: " << vocab.size() << " entries\n";

    sws::models::PretrainOptions options;
    options.learning_rate = c.pretrain.learning_rate;
    options.seed = c.seed + 1;

    {
        sws::models::TinyMaskedLM model(vocab,
                                        {.window = c.pretrain.window,
                                         .embed_dim = c.pretrain.embed_dim,
                                         .hidden_dim = c.pretrain.hidden_dim},
                                        c.seed + 11);
        options.epochs = c.pretrain.mlm_epochs;
        model.pretrain(sentences, options);
        model.save(out / "mlm.bin");
        std::cout << "masked lm -> " << (out / "mlm.bin").string() << '\n';
    }
    {
        sws::models::TinySeq2Seq model(vocab,
                                       {.embed_dim = c.pretrain.embed_dim,
                                        .hidden_dim = c.pretrain.hidden_dim,
                                        .max_positions = 256},
                                       c.seed + 12);
        options.epochs = c.pretrain.seq2seq_epochs;
        model.pretrain(pairs, options);
        model.save(out / "seq2seq.bin");
        std::cout << "seq2seq scorer -> " << (out / "seq2seq.bin").string() << '\n';
    }
    {
        sws::models::TinyCausalLM model(vocab,
                                        {.embed_dim = c.pretrain.embed_dim,
                                         .hidden_dim = c.pretrain.hidden_dim,
                                         .max_positions = 512},
                                        c.seed + 13);
        options.epochs = c.pretrain.causal_epochs;
        model.pretrain(sentences, options);
        model.save(out / "causal.bin");
        std::cout << "causal lm -> " << (out / "causal.bin").string() << '\n';
    }
    return 0;
}

int cmd_train(const Config& c, const fs::path& out) {
    auto model = load_model(c);
    const auto scorer = make_scorer(c);
    const auto corpus = load_dataset(c);

    std::vector<sws::data::DatasetRecord> heldout;
    if (!c.data.heldout_path.empty())
        heldout = sws::data::load(c.data.heldout_path, sws::data::parse_format(c.data.format));

    const auto result = sws::train::fine_tune(model, scorer, corpus, c.train, out, heldout);
    model.save(out / "model.bin");

    std::cout << "steps: " << result.log.size()
              << ", checkpoints: " << result.checkpoint_dirs.size() << '\n';
    if (!result.log.empty() && result.log.back().cs_heldout)
        std::cout << "final held-out median CS: " << *result.log.back().cs_heldout << '\n';
    return 0;
}

int cmd_suggest(const Config& c, const fs::path& out) {
    const auto model = load_model(c);
    const auto records = load_dataset(c);
    const auto plan = make_plan(c);

    std::ofstream os(out / "suggestions.jsonl");
    std::size_t n_sites = 0, n_replace = 0;
    for (const auto& record : records) {
        std::vector<sws::subst::Suggestion> suggestions;
        try {
            suggestions = sws::subst::suggest(record.sentence, model, plan);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NO_ELIGIBLE_SITES) continue;
            throw;
        }
        sws::subst::write_suggestions(os, record.sentence_id, suggestions);
        n_sites += suggestions.size();
        for (const auto& s : suggestions)
            if (s.decision.action == sws::Action::REPLACE) ++n_replace;
    }
    std::cout << "sites: " << n_sites << ", replacements: " << n_replace << '\n';
    return 0;
}

int cmd_evaluate(const Config& c, const fs::path& out) {
    const auto model = load_model(c);
    const auto scorer = make_scorer(c);
    const auto records = load_dataset(c);

    sws::eval::EvalOptions options;
    options.plan = make_plan(c);
    const auto result = sws::eval::evaluate_model(model, scorer, records, options);
    if (result.cs_values.empty()) throw Error(ErrorCode::EMPTY_INPUT, "no evaluable sites");

    sws::eval::MetricReport report;
    report.dataset = c.data.path;
    report.model = c.model.checkpoint;
    report.cs_median = sws::metrics::aggregate(result.cs_values).median;
    report.abr_median = sws::metrics::aggregate(result.abr_values).median;
    report.n_tokens = result.n_sites;

    const auto write_hist = [&](const char* name, const std::vector<double>& values) {
        if (values.empty()) return;
        std::ofstream os(out / name);
        sws::eval::write_histogram_csv(os, values);
        report.distribution_files.push_back(name);
    };
    write_hist("cs_hist.csv", result.cs_values);
    write_hist("abr_hist.csv", result.abr_values);
    write_hist("top2_hist.csv", result.top2_ratios);

    std::ofstream os(out / "metric_report.json");
    sws::eval::write_metric_report(os, report, result.n_skipped);
    std::cout << "n_tokens: " << report.n_tokens << ", cs_median: " << report.cs_median
              << ", abr_median: " << report.abr_median << '\n';
    return 0;
}

int cmd_stat(const Config& c, const fs::path& out) {
    const auto model = load_model(c);
    const auto scorer = make_scorer(c);
    const auto records = load_dataset(c);

    sws::eval::StatOptions options;
    options.plan = make_plan(c);
    options.k_s = c.stat.k_s;
    options.alpha = c.stat.alpha;
    const auto result = sws::eval::evaluate_stat(model, scorer, records, options);

    {
        std::ofstream os(out / "stratification.jsonl");
        sws::stats::write_stratification_report(os, result.strata);
    }
    {
        std::ofstream os(out / "stat_report.json");
        sws::eval::write_stat_report(os, result, c.stat.alpha, c.stat.k_s);
    }
    std::cout << "tokens: " << result.strata.size() << '\n';
    for (const auto& [group, pvalues] : result.pvalues_by_group)
        std::cout << sws::stats::to_string(group) << ": n=" << pvalues.size() << " significant="
                  << sws::stats::significance_proportion(pvalues, c.stat.alpha) << '\n';
    return 0;
}

int cmd_score(const Config& c, const fs::path& out, const std::string& pairs_path) {
    const auto scorer = make_scorer(c);
    if (pairs_path.empty()) config_fail("--pairs FILE is required for score");

    std::ifstream is(pairs_path);
    if (!is) config_fail("cannot read pairs file " + pairs_path);

    std::ofstream os(out / "scores.jsonl");
    std::string line;
    std::size_t lineno = 0, n = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("src") || !rec.contains("tgt"))
            throw Error(ErrorCode::PARSE_ERROR,
                        pairs_path + ":" + std::to_string(lineno) +
                            ": expected {\"src\": ..., \"tgt\": ...}");
        const auto src = sws::tokenize(rec["src"].get<std::string>());
        const auto tgt = sws::tokenize(rec["tgt"].get<std::string>());
        const double value = scorer.score(src, tgt);
        json out_rec{{"src", rec["src"]}, {"tgt", rec["tgt"]}, {"score", value}};
        os << out_rec.dump() << '\n';
        ++n;
    }
    std::cout << "scored " << n << " pairs with " << scorer.scorer_id() << '\n';
    return 0;
}

int cmd_baseline_llm(const Config& c, const fs::path& out) {
    if (c.llm.endpoint.empty()) config_fail("llm.endpoint is required for baseline-llm");
    const auto records = load_dataset(c);

    sws::llm::ClientConfig client;
    client.endpoint = c.llm.endpoint;
    client.path = c.llm.path;
    client.model = c.llm.model;
    client.temperature = c.llm.temperature;
    client.max_retries = c.llm.max_retries;
    client.min_request_interval_s = c.llm.min_request_interval_s;
    client.max_concurrent = c.llm.max_concurrent;
    client.api_key_env = c.llm.api_key_env;
    const auto transport = sws::llm::make_http_transport(client);

    std::ofstream suggestions_os(out / "suggestions.jsonl");
    std::ofstream audit_os(out / "audit.jsonl");
    std::size_t n_replace = 0;
    for (const auto& record : records) {
        std::vector<sws::llm::AuditRecord> audit;
        const auto map = sws::llm::prompt_suggestions(record.sentence, c.llm.ranked_prompt,
                                                      client, *transport, &audit);
        sws::llm::write_audit_log(audit_os, audit);

        const auto decisions = sws::llm::to_decisions(map, record.sentence);
        for (const auto& d : decisions) {
            if (d.decision.action != sws::Action::REPLACE) continue;
            ++n_replace;
            json candidates = json::array();
            for (std::size_t i = 0; i < d.pool.size(); ++i)
                candidates.push_back(
                    {{"token", d.pool.candidates[i]}, {"prob", d.pool.probabilities[i]}});
            json rec{{"sentence_id", record.sentence_id},
                     {"position", d.site.position},
                     {"original", d.site.original_token},
                     {"action", "replace"},
                     {"replacement", *d.decision.replacement},
                     {"candidates", candidates}};
            suggestions_os << rec.dump() << '\n';
        }
    }
    std::cout << "replacements: " << n_replace << '\n';
    return 0;
}

int cmd_report(const fs::path& out, const std::vector<std::string>& from) {
    std::vector<fs::path> dirs(from.begin(), from.end());
    const auto rows = sws::report::collect_metric_reports(dirs);
    {
        std::ofstream os(out / "summary.csv");
        sws::report::write_metric_csv(os, rows);
    }

    // render an SVG for every histogram CSV below the inputs
    std::size_t n_svg = 0;
    for (const auto& dir : dirs) {
        if (!fs::exists(dir)) continue;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const auto name = entry.path().filename().string();
            if (!name.ends_with("_hist.csv")) continue;

            std::ifstream is(entry.path());
            std::string line;
            std::getline(is, line);  // header
            std::vector<double> expanded;
            while (std::getline(is, line)) {
                double left = 0, right = 0;
                std::size_t count = 0;
                if (std::sscanf(line.c_str(), "%lf,%lf,%zu", &left, &right, &count) == 3)
                    for (std::size_t i = 0; i < count; ++i)
                        expanded.push_back((left + right) / 2.0);
            }
            if (expanded.empty()) continue;
            std::ofstream os(out / (entry.path().stem().string() + ".svg"));
            sws::report::write_histogram_svg(os, expanded, 50, entry.path().stem().string());
            ++n_svg;
        }
    }
    std::cout << "rows: " << rows.size() << ", figures: " << n_svg << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"label-free word substitution training and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "out", pairs_path;
    Overrides overrides;
    std::vector<std::string> report_from;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (default: out)");
    std::uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "override the config seed");
    std::string cache_opt;
    auto* cache_flag = app.add_option("--scorer-cache", cache_opt, "score cache file");
    std::size_t ks_opt = 0;
    auto* ks_flag = app.add_option("--k-s", ks_opt, "reference-distribution size");
    double alpha_opt = 0.0;
    auto* alpha_flag = app.add_option("--alpha", alpha_opt, "significance threshold");

    auto* make_corpus = app.add_subcommand("make-corpus", "generate a synthetic corpus");
    auto* pretrain = app.add_subcommand("pretrain", "train the base models from scratch");
    auto* train = app.add_subcommand("train", "fine-tune the substitution model");
    auto* suggest = app.add_subcommand("suggest", "run the substitution engine over a dataset");
    auto* evaluate = app.add_subcommand("evaluate", "alignment and quality metrics");
    auto* stat = app.add_subcommand("stat", "p-value proportions and stratification");
    auto* score = app.add_subcommand("score", "raw scorer calls over sentence pairs");
    score->add_option("--pairs", pairs_path, "JSONL file of {\"src\": ..., \"tgt\": ...}");
    auto* baseline = app.add_subcommand("baseline-llm", "external-LLM baseline suggestions");
    auto* report = app.add_subcommand("report", "assemble CSV tables and figures from runs");
    report->add_option("--from", report_from, "run directories to collect")->expected(-1);

    CLI11_PARSE(app, argc, argv);

    if (!seed_flag->empty()) overrides.seed = seed_opt;
    if (!cache_flag->empty()) overrides.scorer_cache = cache_opt;
    if (!ks_flag->empty()) overrides.k_s = ks_opt;
    if (!alpha_flag->empty()) overrides.alpha = alpha_opt;

    try {
        const auto out = ensure_out(out_dir);
        Config config = load_config(config_path, overrides);

        int rc = 1;
        std::string command;
        if (make_corpus->parsed()) rc = cmd_make_corpus(config, out), command = "make-corpus";
        if (pretrain->parsed()) rc = cmd_pretrain(config, out), command = "pretrain";
        if (train->parsed()) rc = cmd_train(config, out), command = "train";
        if (suggest->parsed()) rc = cmd_suggest(config, out), command = "suggest";
        if (evaluate->parsed()) rc = cmd_evaluate(config, out), command = "evaluate";
        if (stat->parsed()) rc = cmd_stat(config, out), command = "stat";
        if (score->parsed()) rc = cmd_score(config, out, pairs_path), command = "score";
        if (baseline->parsed()) rc = cmd_baseline_llm(config, out), command = "baseline-llm";
        if (report->parsed()) rc = cmd_report(out, report_from), command = "report";

        write_manifest(out, command, config, config_path);
        return rc;
    } catch (const Error& e) {
        std::cerr << sws::to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::CONFIG_INVALID ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR: " << e.what() << '\n';
        return 1;
    }
}

#include "sws/eval.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "sws/error.hpp"
#include "sws/metrics.hpp"

namespace sws::eval {

using nlohmann::json;

namespace {

ScoreRecord score_pool(const CandidatePool& pool, const Scorer& scorer) {
    const Sentence& sentence = *pool.site.sentence;
    ScoreRecord record;
    record.scorer_id = scorer.scorer_id();
    record.original_score = scorer.score(sentence, sentence);

    std::vector<Sentence> modified;
    modified.reserve(pool.size());
    for (const auto& candidate : pool.candidates)
        modified.push_back(apply_substitution(sentence, pool.site, candidate));
    record.candidate_scores = scorer.score_batch(sentence, modified);
    return record;
}

}  // namespace

EvalResult evaluate_model(const SubstitutionModel& model, const Scorer& scorer,
                          std::span<const data::DatasetRecord> records,
                          const EvalOptions& options) {
    EvalResult out;
    const auto eligible = default_eligibility(model);

    for (const auto& record : records) {
        std::vector<TokenSite> sites;
        try {
            sites = sample_token_sites(record.sentence, options.plan, eligible);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NO_ELIGIBLE_SITES) continue;
            throw;
        }
        for (const auto& site : sites) {
            const auto pool = build_candidate_pool(model, site, options.plan.pool_size);
            if (pool.size() < 2) {
                ++out.n_skipped;
                continue;
            }
            const auto scores = score_pool(pool, scorer);
            out.cs_values.push_back(metrics::cs(pool, scores));
            out.abr_values.push_back(metrics::abr(scores));
            ++out.n_sites;

            if (options.with_top2) {
                if (const auto second = subst::top2(pool)) {
                    const auto modified =
                        apply_substitution(record.sentence, site, *second);
                    const double top2_score = scorer.score(record.sentence, modified);
                    out.top2_ratios.push_back(
                        metrics::top2_ratio(scores.original_score, top2_score));
                }
            }
        }
    }
    return out;
}

double median_cs(const SubstitutionModel& model, const Scorer& scorer,
                 std::span<const data::DatasetRecord> records, const SamplingPlan& plan) {
    EvalOptions options;
    options.plan = plan;
    options.with_top2 = false;
    const auto result = evaluate_model(model, scorer, records, options);
    if (result.cs_values.empty()) throw Error(ErrorCode::EMPTY_INPUT, "no sites to evaluate");
    return metrics::aggregate(result.cs_values).median;
}

void write_metric_report(std::ostream& os, const MetricReport& report, std::size_t n_skipped) {
    json doc{{"dataset", report.dataset},
             {"model", report.model},
             {"cs_median", report.cs_median},
             {"abr_median", report.abr_median},
             {"n_tokens", report.n_tokens},
             {"n_skipped", n_skipped},
             {"distribution_files", report.distribution_files}};
    os << doc.dump(2) << '\n';
}

void write_histogram_csv(std::ostream& os, std::span<const double> values, std::size_t bins) {
    const auto agg = metrics::aggregate(values, bins);
    os << "bin_left,bin_right,count\n";
    for (const auto& bin : agg.histogram)
        os << bin.left << ',' << bin.right << ',' << bin.count << '\n';
}

StatResult evaluate_stat(const SubstitutionModel& model, const Scorer& scorer,
                         std::span<const data::DatasetRecord> records,
                         const StatOptions& options) {
    StatResult out;

    for (const auto& record : records) {
        for (const auto& annotation : record.annotations) {
            const auto site = make_site(record.sentence, annotation.target_position);

            // One K_s-sized pool serves both the decision and the statistic.
            const auto pool = build_candidate_pool(model, site, options.k_s);
            if (pool.candidates.empty()) continue;

            AnnotatedToken token;
            token.site = site;
            token.annotator_suggestions = annotation.suggestions;
            token.model_decision = subst::decide(pool);
            const auto group = stats::stratify(token);
            ++out.group_counts[group];

            stats::StratumRecord stratum;
            stratum.group = group;
            stratum.sentence_id = record.sentence_id;
            stratum.position = annotation.target_position;

            if (pool.size() >= 2) {
                const auto scores = score_pool(pool, scorer);
                const double target = scores.candidate_scores[0];  // top candidate
                std::vector<double> refs(scores.candidate_scores.begin() + 1,
                                         scores.candidate_scores.end());
                const auto pv = stats::reference_pvalue(target, refs);
                stratum.p_value = pv.p_value;
                out.pvalues_by_group[group].push_back(pv.p_value);
            }
            out.strata.push_back(std::move(stratum));
        }
    }
    return out;
}

void write_stat_report(std::ostream& os, const StatResult& result, double alpha, std::size_t k_s) {
    json groups = json::object();
    for (const auto& [group, pvalues] : result.pvalues_by_group) {
        json g{{"n", pvalues.size()},
               {"significant_proportion",
                pvalues.empty() ? json(nullptr)
                                : json(stats::significance_proportion(pvalues, alpha))}};
        groups[std::string(stats::to_string(group))] = g;
    }
    json counts = json::object();
    for (const auto& [group, n] : result.group_counts)
        counts[std::string(stats::to_string(group))] = n;
    json proportions = json::object();
    for (const auto& [group, p] : stats::row_proportions(result.group_counts))
        proportions[std::string(stats::to_string(group))] = p;

    json doc{{"alpha", alpha},
             {"k_s", k_s},
             {"groups", groups},
             {"counts", counts},
             {"row_proportions", proportions},
             {"n_tokens", result.strata.size()}};
    os << doc.dump(2) << '\n';
}

}  // namespace sws::eval

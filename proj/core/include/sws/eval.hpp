#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sws/candidates.hpp"
#include "sws/data.hpp"
#include "sws/scorer.hpp"
#include "sws/stats.hpp"
#include "sws/subst.hpp"

namespace sws::eval {

struct EvalOptions {
    SamplingPlan plan;
    bool with_top2 = true;
};

// Per-site alignment/quality metrics over a dataset: one CS and ABR value per
// evaluated site, plus top-2 score ratios where a second substitute exists.
struct EvalResult {
    std::vector<double> cs_values;
    std::vector<double> abr_values;
    std::vector<double> top2_ratios;
    std::size_t n_sites = 0;    // sites evaluated (pools with K >= 2)
    std::size_t n_skipped = 0;  // sites excluded because the pool had K < 2
};

EvalResult evaluate_model(const SubstitutionModel& model, const Scorer& scorer,
                          std::span<const data::DatasetRecord> records,
                          const EvalOptions& options);

double median_cs(const SubstitutionModel& model, const Scorer& scorer,
                 std::span<const data::DatasetRecord> records, const SamplingPlan& plan);

// The metric report document plus histogram sidecar files.
struct MetricReport {
    std::string dataset;
    std::string model;
    double cs_median = 0.0;
    double abr_median = 0.0;
    std::size_t n_tokens = 0;
    std::vector<std::string> distribution_files;
};

void write_metric_report(std::ostream& os, const MetricReport& report, std::size_t n_skipped);
void write_histogram_csv(std::ostream& os, std::span<const double> values, std::size_t bins = 50);

struct StatOptions {
    SamplingPlan plan;
    std::size_t k_s = 1000;
    double alpha = 0.01;
};

// Per-annotated-token stratification and reference p-values for the model's
// top candidate against the other K_s - 1 pool members.
struct StatResult {
    std::vector<stats::StratumRecord> strata;
    std::map<stats::GroupLabel, std::vector<double>> pvalues_by_group;
    std::map<stats::GroupLabel, std::size_t> group_counts;
};

StatResult evaluate_stat(const SubstitutionModel& model, const Scorer& scorer,
                         std::span<const data::DatasetRecord> records, const StatOptions& options);

void write_stat_report(std::ostream& os, const StatResult& result, double alpha, std::size_t k_s);

}  // namespace sws::eval

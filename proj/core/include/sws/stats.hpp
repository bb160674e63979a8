#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sws/pool.hpp"

namespace sws::stats {

// Where a candidate's score falls within an empirical reference distribution:
// the fraction of the K_s - 1 alternatives that strictly outscore it.
struct PValueResult {
    double p_value = 0.0;
    std::size_t k_s = 0;
    double target_score = 0.0;
    std::size_t n_exceeding = 0;
};

PValueResult reference_pvalue(double target_score, std::span<const double> reference_scores);

// Fraction of p-values strictly below alpha.
double significance_proportion(std::span<const double> p_values, double alpha);

enum class GroupLabel { CA, CD, NCA, OMC, OAC };

std::string_view to_string(GroupLabel label);

// Buckets a token by agreement between the annotators and the model:
//   NCA  neither changed          OAC  only the annotator changed
//   OMC  only the model changed   CA   both changed, same word
//   CD   both changed, different word
GroupLabel stratify(const AnnotatedToken& token);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

// One stratification-report row; p_value is absent when the evaluated system
// produced no candidates at the site.
struct StratumRecord {
    GroupLabel group;
    std::optional<double> p_value;
    std::string sentence_id;
    std::size_t position = 0;
};

void write_stratification_report(std::ostream& os, std::span<const StratumRecord> records);

// Proportions of each group within its annotator row (changed vs unchanged),
// the normalization used for token-change summary tables.
std::map<GroupLabel, double> row_proportions(const std::map<GroupLabel, std::size_t>& counts);

}  // namespace sws::stats

#include "sws/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sws/error.hpp"

namespace sws::stats {

PValueResult reference_pvalue(double target_score, std::span<const double> reference_scores) {
    if (reference_scores.empty())
        throw Error(ErrorCode::EMPTY_REFERENCE, "reference score set is empty");
    if (!std::isfinite(target_score))
        throw Error(ErrorCode::BACKEND_FAILURE, "non-finite target score");

    std::size_t exceeding = 0;
    for (double s : reference_scores) {
        if (!std::isfinite(s)) throw Error(ErrorCode::BACKEND_FAILURE, "non-finite reference score");
        if (s > target_score) ++exceeding;  // strict: ties do not count against the target
    }

    PValueResult out;
    out.n_exceeding = exceeding;
    out.k_s = reference_scores.size() + 1;
    out.target_score = target_score;
    out.p_value = static_cast<double>(exceeding) / static_cast<double>(reference_scores.size());
    return out;
}

double significance_proportion(std::span<const double> p_values, double alpha) {
    if (p_values.empty()) throw Error(ErrorCode::EMPTY_INPUT, "no p-values");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::CONFIG_INVALID, "alpha must lie in (0,1)");
    std::size_t below = 0;
    for (double p : p_values) {
        if (p < 0.0 || p > 1.0) throw Error(ErrorCode::CONFIG_INVALID, "p-value outside [0,1]");
        if (p < alpha) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(p_values.size());
}

std::string_view to_string(GroupLabel label) {
    switch (label) {
        case GroupLabel::CA: return "CA";
        case GroupLabel::CD: return "CD";
        case GroupLabel::NCA: return "NCA";
        case GroupLabel::OMC: return "OMC";
        case GroupLabel::OAC: return "OAC";
    }
    return "?";
}

GroupLabel stratify(const AnnotatedToken& token) {
    const bool annotator_changed = !token.annotator_suggestions.empty();
    const bool model_changed = token.model_decision.action == Action::REPLACE;

    if (!annotator_changed && !model_changed) return GroupLabel::NCA;
    if (annotator_changed && !model_changed) return GroupLabel::OAC;
    if (!annotator_changed) return GroupLabel::OMC;

    const auto& replacement = token.model_decision.replacement;
    if (replacement && token.annotator_suggestions.count(*replacement) > 0) return GroupLabel::CA;
    return GroupLabel::CD;
}

namespace {

// Average ranks (1-based) with ties sharing the mean of their rank block.
std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LENGTH_MISMATCH, "input lengths differ");
    if (a.size() < 2) throw Error(ErrorCode::EMPTY_INPUT, "need at least two observations");

    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);

    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        throw Error(ErrorCode::CONSTANT_INPUT, "rank correlation undefined for constant input");
    return cov / std::sqrt(var_a * var_b);
}

void write_stratification_report(std::ostream& os, std::span<const StratumRecord> records) {
    for (const auto& r : records) {
        os << "{\"group\": \"" << to_string(r.group) << "\", \"p_value\": ";
        if (r.p_value)
            os << *r.p_value;
        else
            os << "null";
        os << ", \"sentence_id\": \"" << r.sentence_id << "\", \"position\": " << r.position
           << "}\n";
    }
}

std::map<GroupLabel, double> row_proportions(const std::map<GroupLabel, std::size_t>& counts) {
    auto count = [&](GroupLabel g) -> double {
        auto it = counts.find(g);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    // Row 1: annotator changed the token (OAC, CA, CD).
    // Row 2: annotator kept it (NCA, OMC).
    const double changed = count(GroupLabel::OAC) + count(GroupLabel::CA) + count(GroupLabel::CD);
    const double unchanged = count(GroupLabel::NCA) + count(GroupLabel::OMC);

    std::map<GroupLabel, double> out;
    if (changed > 0.0) {
        out[GroupLabel::OAC] = count(GroupLabel::OAC) / changed;
        out[GroupLabel::CA] = count(GroupLabel::CA) / changed;
        out[GroupLabel::CD] = count(GroupLabel::CD) / changed;
    }
    if (unchanged > 0.0) {
        out[GroupLabel::NCA] = count(GroupLabel::NCA) / unchanged;
        out[GroupLabel::OMC] = count(GroupLabel::OMC) / unchanged;
    }
    return out;
}

}  // namespace sws::stats

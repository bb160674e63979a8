#pragma once

#include <optional>
#include <span>
#include <vector>

namespace sws::losses {

// Everything a training objective consumes for one token site. `logits` and
// `scores` (and `ref_logits` for the DPO family) are aligned candidate-wise
// and must be ordered so that scores are non-increasing: index 0 is the
// best-scored candidate. Use sort_for_ranking to establish that order.
struct LossBatch {
    std::vector<double> logits;
    std::optional<std::vector<double>> ref_logits;
    std::vector<double> scores;
    double original_score = 0.0;
    double margin_unit = 0.5;   // lambda; pair (k,j) carries margin lambda*(j-k)
    double mix_weight = 1.0;    // gamma
    double dpo_scale = 1.0;     // delta
};

struct LossValue {
    double value = 0.0;
    std::vector<double> grad;  // d value / d logits (policy side only)
};

enum class CombineMode { MR_AS, MR_BS };

// Weighting of the top candidate in the best-score hinge. The pool-softmax
// probability is the default; identity is available for comparison runs.
enum class TopWeight { SOFTMAX, IDENTITY };

// Returns the permutation that orders candidates by non-increasing score,
// breaking ties by descending logit and then by original index.
std::vector<std::size_t> ranking_order(std::span<const double> logits,
                                       std::span<const double> scores);

// Applies ranking_order to (logits, scores) in place and returns the
// permutation that was applied.
std::vector<std::size_t> sort_for_ranking(std::vector<double>& logits,
                                          std::vector<double>& scores);

// Pairwise hinge on all (k, j) with k < j:  sum max(0, s_j - s_k + lambda*(j-k)).
// Subgradient 0 exactly at the kinks.
LossValue margin_ranking_loss(const LossBatch& batch);

// Negative softmax-weighted average of candidate scores.
LossValue avg_score_loss(const LossBatch& batch);

// Hinge on the top candidate's score deficit against the original sentence,
// weighted by the top candidate's pool probability (or raw logit).
LossValue best_score_loss(const LossBatch& batch, TopWeight weight = TopWeight::SOFTMAX);

// L_MR + gamma * (L_AS or L_BS).
LossValue combined_loss(const LossBatch& batch, CombineMode mode,
                        TopWeight weight = TopWeight::SOFTMAX);

// Listwise preference loss under the Plackett-Luce model over reward margins
// r_k = policy_loglik_k - ref_loglik_k, with preferred candidates first.
// Stable log-sum-exp; gradient is with respect to the policy log-likelihoods.
LossValue dpo_pl_loss(std::span<const double> policy_logliks,
                      std::span<const double> ref_logliks, double delta);

// Adjacent-pair simplification: -sum_k (s_k - s^_k - s_{k+1} + s^_{k+1}).
LossValue dpo_star_loss(const LossBatch& batch);

// Log-logistic-scaled variant of the adjacent-pair loss.
LossValue sigma_dpo_star_loss(const LossBatch& batch);

// -log softmax(logits)[best_index].
LossValue cross_entropy_best(std::span<const double> logits, std::size_t best_index);

// Numerically stable helpers shared with the model code.
std::vector<double> softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> values);
double log_sigmoid(double x);
double sigmoid(double x);

}  // namespace sws::losses

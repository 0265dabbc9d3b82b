#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "hulm/data.hpp"
#include "hulm/types.hpp"

namespace hulm {

enum class ModelKind { hulm, naive };

/// Aggregated evaluation results. confusion(i, j) counts series of true
/// class i predicted as j; its entries sum to the number of evaluated
/// series and error_rate = 1 - trace/total.
struct EvalReport {
    double error_rate = 0.0;
    Eigen::MatrixXi confusion;
    std::optional<std::vector<double>> per_fold_errors;
    std::optional<double> auc;
    std::optional<double> f1;
    std::vector<std::string> warnings;

    std::string to_json() const;
    std::string render_table() const;
};

/// Fraction of mismatched entries. Inputs must be nonempty and equal length.
double error_rate(const std::vector<int>& preds, const std::vector<int>& truth);

/// Probability that a random positive outscores a random negative, ties
/// worth 1/2 (midrank formulation). Requires both classes present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth);

/// 2PR/(P+R) with the conventions: no positive predictions means
/// precision 0, and F1 is 0 when precision and recall are both 0.
double f1_score(const std::vector<int>& preds, const std::vector<int>& truth);

/// Trains on each fold's complement and evaluates on the fold. Pools the
/// confusion matrix over folds and records per-fold error rates. Training
/// errors are rethrown tagged with the fold index. Folds may run in
/// parallel when threads > 1; the report is assembled in fold order.
EvalReport cross_validate(const Dataset& data, const FoldPlan& plan, const Hyperparams& hyper,
                          ModelKind kind, int threads = 1);

/// Binary detection of one class against the rest with a K=2 hidden-unit
/// model per fold. Scores are the posterior of the target class; AUC is
/// computed over scores pooled across usable folds and F1 at threshold 0.5.
/// A fold whose test or training side carries a single class is skipped
/// with a warning rather than failed.
EvalReport one_vs_rest_detect(const Dataset& data, int target_class, const FoldPlan& plan,
                              const Hyperparams& hyper, int threads = 1);

}  // namespace hulm

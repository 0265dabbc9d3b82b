#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hulm/model.hpp"
#include "hulm/types.hpp"

namespace hulm {

/// Gradient of the conditional log-likelihood, one block per parameter block.
struct Gradient {
    Eigen::VectorXd d_pi, d_tau, d_A, d_b, d_c;
    Eigen::MatrixXd d_W, d_V;

    static Gradient zeros(int hidden, int dim, int classes);
};

/// Same block order as param_blocks(HulmParams&).
std::array<ParamBlock, 7> param_blocks(Gradient& grad);

/// Per-epoch training trace. objective holds the regularized negative
/// conditional log-likelihood (a loss: lower is better), one entry per
/// completed epoch; train_error holds the matching training error rates.
/// val_error is filled only when train_sgd received a validation set.
struct TrainReport {
    std::vector<double> objective;
    std::vector<double> train_error;
    std::vector<double> val_error;
    HulmParams final_params;
};

/// Regularized conditional log-likelihood of a fully labeled dataset:
///   sum_n [log M(x_n, y_n) - logsumexp_y' log M(x_n, y')]
///   - lambda (|A|^2 + |W|^2 + |V|^2).
/// Always <= 0. Throws std::invalid_argument on an unlabeled series.
double cond_log_likelihood(const Dataset& data, const HulmParams& theta, double lambda);

/// Exact single-example gradient of the unregularized log-likelihood:
/// posterior expectations under the clamped label minus their average under
/// the label posterior. All seven blocks filled.
Gradient gradient_example(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

/// Sum of per-example gradients minus the regularizer derivative
/// 2*lambda*(A, W, V); other blocks are untouched by lambda. When
/// threads > 1, per-example gradients are computed in parallel and reduced
/// in index order, so the result matches the single-threaded one.
Gradient gradient_batch(std::span<const TimeSeries> batch, const HulmParams& theta,
                        double lambda, int num_classes, int threads = 1);
Gradient gradient_batch(const Dataset& batch, const HulmParams& theta, double lambda,
                        int threads = 1);

/// Mini-batch stochastic gradient ascent on the regularized conditional
/// log-likelihood. Starts from init_params(hyper.seed); each epoch shuffles
/// the data (seeded) and steps with learning_rate * lr_decay^epoch. The
/// objective is evaluated on the full training set once per epoch; a
/// non-finite value raises DivergedError naming the epoch. Deterministic
/// given the seed.
TrainReport train_sgd(const Dataset& data, const Hyperparams& hyper,
                      const std::optional<Dataset>& validation = std::nullopt,
                      int threads = 1);

/// Trains once per grid value and returns the lambda with the lowest
/// validation error; ties break toward the larger lambda. A grid value whose
/// run diverges is scored as unusable (error = +inf) rather than aborting
/// the sweep.
double tune_lambda(const Dataset& train, const Dataset& val, const Hyperparams& hyper,
                   std::span<const double> grid, int threads = 1);

}  // namespace hulm

#pragma once

#include <Eigen/Core>
#include <string>

#include "hulm/types.hpp"

namespace hulm {

/// Linear logistic baseline. Scores a series through the sum of its frames:
/// softmax_k(W_k . sum_t x_t + c_k), so any two time orderings of the same
/// frames are indistinguishable to it.
struct NaiveParams {
    Eigen::MatrixXd W;  // K x D
    Eigen::VectorXd c;  // K

    Eigen::Index dim() const { return W.cols(); }
    Eigen::Index classes() const { return c.size(); }

    static NaiveParams zeros(int dim, int classes);
};

/// Posterior over classes; sums to 1.
Eigen::VectorXd naive_predict(const TimeSeries& x, const NaiveParams& params);

/// Argmax of naive_predict, ties to the lowest index.
int naive_predict_label(const TimeSeries& x, const NaiveParams& params);

/// Maximizes sum_n log p(y_n | x_n) - lambda |W|^2 by seeded SGD with the
/// same schedule as the hidden-unit trainer, starting from zero parameters.
NaiveParams naive_train(const Dataset& data, const Hyperparams& hyper);

/// Same versioned document scheme as the hidden-unit model, kind tag "naive".
void save_naive(const NaiveParams& params, const std::string& path);
NaiveParams load_naive(const std::string& path);

}  // namespace hulm

#include "hulm/naive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hulm/rng.hpp"

namespace hulm {

NaiveParams NaiveParams::zeros(int dim, int classes) {
    NaiveParams p;
    p.W = Eigen::MatrixXd::Zero(classes, dim);
    p.c = Eigen::VectorXd::Zero(classes);
    return p;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
    const Eigen::VectorXd shifted = (scores.array() - scores.maxCoeff()).exp();
    return shifted / shifted.sum();
}

Eigen::VectorXd frame_sum(const TimeSeries& x) {
    return x.frames.colwise().sum().transpose();
}

}  // namespace

Eigen::VectorXd naive_predict(const TimeSeries& x, const NaiveParams& params) {
    if (x.dim() != params.dim()) {
        throw std::invalid_argument("series dimension " + std::to_string(x.dim()) +
                                    " does not match model dimension " +
                                    std::to_string(params.dim()));
    }
    return softmax(params.W * frame_sum(x) + params.c);
}

int naive_predict_label(const TimeSeries& x, const NaiveParams& params) {
    const Eigen::VectorXd p = naive_predict(x, params);
    int best = 0;
    for (int k = 1; k < p.size(); ++k) {
        if (p(k) > p(best)) best = k;
    }
    return best;
}

NaiveParams naive_train(const Dataset& data, const Hyperparams& hyper) {
    hyper.validate();
    if (data.series.empty()) throw std::invalid_argument("training set is empty");
    const int classes = data.num_classes;
    std::vector<Eigen::VectorXd> sums;
    sums.reserve(data.size());
    for (const TimeSeries& x : data.series) {
        if (!x.label) throw std::invalid_argument("series is unlabeled");
        if (*x.label < 0 || *x.label >= classes) {
            throw std::invalid_argument("label out of range");
        }
        sums.push_back(frame_sum(x));
    }

    NaiveParams params = NaiveParams::zeros(data.dim, classes);
    Rng order_rng(hyper.seed + 1);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const double step = hyper.learning_rate * std::pow(hyper.lr_decay, epoch);
        order_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            Eigen::MatrixXd grad_w = Eigen::MatrixXd::Zero(classes, data.dim);
            Eigen::VectorXd grad_c = Eigen::VectorXd::Zero(classes);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t n = order[i];
                const Eigen::VectorXd p = softmax(params.W * sums[n] + params.c);
                Eigen::VectorXd residual = -p;
                residual(*data.series[n].label) += 1.0;
                grad_w += residual * sums[n].transpose();
                grad_c += residual;
            }
            grad_w -= 2.0 * hyper.l2_lambda * params.W;
            params.W += step * grad_w;
            params.c += step * grad_c;
        }
        if (!params.W.allFinite() || !params.c.allFinite()) {
            throw DivergedError("training diverged at epoch " + std::to_string(epoch));
        }
    }
    return params;
}

}  // namespace hulm

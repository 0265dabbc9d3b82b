#include "hulm/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hulm/detail/parallel.hpp"
#include "hulm/inference.hpp"
#include "hulm/numeric.hpp"
#include "hulm/rng.hpp"

namespace hulm {

Gradient Gradient::zeros(int hidden, int dim, int classes) {
    Gradient g;
    g.d_pi = Eigen::VectorXd::Zero(hidden);
    g.d_tau = Eigen::VectorXd::Zero(hidden);
    g.d_A = Eigen::VectorXd::Zero(hidden);
    g.d_b = Eigen::VectorXd::Zero(hidden);
    g.d_c = Eigen::VectorXd::Zero(classes);
    g.d_W = Eigen::MatrixXd::Zero(hidden, dim);
    g.d_V = Eigen::MatrixXd::Zero(hidden, classes);
    return g;
}

std::array<ParamBlock, 7> param_blocks(Gradient& grad) {
    return {{{"pi", grad.d_pi.data(), grad.d_pi.size()},
             {"tau", grad.d_tau.data(), grad.d_tau.size()},
             {"A", grad.d_A.data(), grad.d_A.size()},
             {"b", grad.d_b.data(), grad.d_b.size()},
             {"c", grad.d_c.data(), grad.d_c.size()},
             {"W", grad.d_W.data(), grad.d_W.size()},
             {"V", grad.d_V.data(), grad.d_V.size()}}};
}

namespace {

LabelVector required_label(const TimeSeries& x, int num_classes) {
    if (!x.label) throw std::invalid_argument("series is unlabeled");
    return LabelVector(*x.label, num_classes);
}

/// Adds weight * E[dE/dtheta] under the posterior encoded by marg for the
/// given label. The energy is linear in every parameter, so each block's
/// expectation is a sum of node/edge marginals against the matching inputs.
void accumulate_expectation(Gradient& grad, const Marginals& marg, const TimeSeries& x,
                            int label, double weight) {
    const Eigen::Index len = x.length();
    const Eigen::Index hidden = grad.d_b.size();
    for (Eigen::Index h = 0; h < hidden; ++h) {
        double occupancy = 0.0;  // sum_t gamma(t, h, 1)
        for (Eigen::Index t = 0; t < len; ++t) {
            const double g1 = marg.gamma(t, h, 1);
            occupancy += g1;
            grad.d_W.row(h) += weight * g1 * x.frames.row(t);
        }
        double edge = 0.0;  // sum_t xi(t, h, 1, 1)
        for (Eigen::Index t = 0; t + 1 < len; ++t) edge += marg.xi(t, h, 1, 1);

        grad.d_b(h) += weight * occupancy;
        grad.d_V(h, label) += weight * occupancy;
        grad.d_A(h) += weight * edge;
        grad.d_pi(h) += weight * marg.gamma(0, h, 1);
        grad.d_tau(h) += weight * marg.gamma(len - 1, h, 1);
    }
    grad.d_c(label) += weight;
}

void axpy(HulmParams& theta, const Gradient& grad, double step) {
    theta.pi += step * grad.d_pi;
    theta.tau += step * grad.d_tau;
    theta.A += step * grad.d_A;
    theta.b += step * grad.d_b;
    theta.c += step * grad.d_c;
    theta.W += step * grad.d_W;
    theta.V += step * grad.d_V;
}

void add_into(Gradient& acc, const Gradient& g) {
    acc.d_pi += g.d_pi;
    acc.d_tau += g.d_tau;
    acc.d_A += g.d_A;
    acc.d_b += g.d_b;
    acc.d_c += g.d_c;
    acc.d_W += g.d_W;
    acc.d_V += g.d_V;
}

double training_error(const Dataset& data, const HulmParams& theta) {
    std::size_t wrong = 0;
    for (const TimeSeries& x : data.series) {
        if (predict_label(x, theta) != *x.label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace

double cond_log_likelihood(const Dataset& data, const HulmParams& theta, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    double total = 0.0;
    for (const TimeSeries& x : data.series) {
        const LabelVector y = required_label(x, static_cast<int>(theta.classes()));
        const Eigen::VectorXd scores = all_label_log_m(x, theta);
        total += scores(y.index()) -
                 log_sum_exp(std::span<const double>(scores.data(), scores.size()));
    }
    total -= lambda * (theta.A.squaredNorm() + theta.W.squaredNorm() + theta.V.squaredNorm());
    return total;
}

Gradient gradient_example(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    const int classes = static_cast<int>(theta.classes());
    if (y.num_classes() != classes) {
        throw std::invalid_argument("label alphabet does not match model classes");
    }

    // One message pass per label serves both terms: the clamped expectation
    // is the y-conditioned one, the free expectation is their posterior-
    // weighted average. Folding the weights gives [k == y] - p(k | x).
    std::vector<Marginals> per_label(classes);
    Eigen::VectorXd scores(classes);
    for (int k = 0; k < classes; ++k) {
        const MessageTable msgs = messages(x, LabelVector(k, classes), theta);
        scores(k) = theta.c(k) + msgs.log_chain.sum();
        per_label[k] = marginals(msgs, theta);
    }
    const Eigen::VectorXd shifted = (scores.array() - scores.maxCoeff()).exp();
    const Eigen::VectorXd posterior = shifted / shifted.sum();

    Gradient grad = Gradient::zeros(static_cast<int>(theta.hidden()),
                                    static_cast<int>(theta.dim()), classes);
    for (int k = 0; k < classes; ++k) {
        const double weight = (k == y.index() ? 1.0 : 0.0) - posterior(k);
        accumulate_expectation(grad, per_label[k], x, k, weight);
    }
    return grad;
}

Gradient gradient_batch(std::span<const TimeSeries> batch, const HulmParams& theta,
                        double lambda, int num_classes, int threads) {
    if (batch.empty()) throw std::invalid_argument("gradient_batch requires a nonempty batch");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

    const int hidden = static_cast<int>(theta.hidden());
    const int dim = static_cast<int>(theta.dim());
    Gradient total = Gradient::zeros(hidden, dim, num_classes);

    if (threads > 1 && batch.size() > 1) {
        std::vector<Gradient> slots(batch.size());
        detail::parallel_for(batch.size(), threads, [&](std::size_t i) {
            slots[i] = gradient_example(batch[i], required_label(batch[i], num_classes), theta);
        });
        for (const Gradient& g : slots) add_into(total, g);  // fixed reduce order
    } else {
        for (const TimeSeries& x : batch) {
            add_into(total, gradient_example(x, required_label(x, num_classes), theta));
        }
    }

    total.d_A -= 2.0 * lambda * theta.A;
    total.d_W -= 2.0 * lambda * theta.W;
    total.d_V -= 2.0 * lambda * theta.V;
    return total;
}

Gradient gradient_batch(const Dataset& batch, const HulmParams& theta, double lambda,
                        int threads) {
    return gradient_batch(std::span<const TimeSeries>(batch.series), theta, lambda,
                          batch.num_classes, threads);
}

TrainReport train_sgd(const Dataset& data, const Hyperparams& hyper,
                      const std::optional<Dataset>& validation, int threads) {
    hyper.validate();
    if (data.series.empty()) throw std::invalid_argument("training set is empty");
    for (const TimeSeries& x : data.series) required_label(x, data.num_classes);
    if (validation) {
        for (const TimeSeries& x : validation->series) required_label(x, data.num_classes);
    }

    TrainReport report;
    report.final_params =
        init_params(hyper.hidden_units, data.dim, data.num_classes, hyper.seed);
    HulmParams& theta = report.final_params;

    Rng order_rng(hyper.seed + 1);  // distinct stream from init_params
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<TimeSeries> batch;

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const double step = hyper.learning_rate * std::pow(hyper.lr_decay, epoch);
        order_rng.shuffle(order);
        try {
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(hyper.batch_size)) {
                const std::size_t stop =
                    std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
                batch.clear();
                for (std::size_t i = start; i < stop; ++i) batch.push_back(data.series[order[i]]);
                const Gradient grad =
                    gradient_batch(batch, theta, hyper.l2_lambda, data.num_classes, threads);
                axpy(theta, grad, step);
            }
            const double objective = -cond_log_likelihood(data, theta, hyper.l2_lambda);
            if (!std::isfinite(objective)) throw NumericError("objective is not finite");
            report.objective.push_back(objective);
            report.train_error.push_back(training_error(data, theta));
            if (validation) report.val_error.push_back(training_error(*validation, theta));
        } catch (const NumericError& err) {
            throw DivergedError("training diverged at epoch " + std::to_string(epoch) + ": " +
                                err.what());
        }
    }
    return report;
}

double tune_lambda(const Dataset& train, const Dataset& val, const Hyperparams& hyper,
                   std::span<const double> grid, int threads) {
    if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
    for (double lambda : grid) {
        if (lambda < 0.0) throw std::invalid_argument("lambda grid values must be >= 0");
    }

    double best_lambda = 0.0;
    double best_error = std::numeric_limits<double>::infinity();
    bool first = true;
    for (double lambda : grid) {
        Hyperparams trial = hyper;
        trial.l2_lambda = lambda;
        double val_error;
        try {
            const TrainReport report = train_sgd(train, trial, std::nullopt, threads);
            std::size_t wrong = 0;
            for (const TimeSeries& x : val.series) {
                required_label(x, train.num_classes);
                if (predict_label(x, report.final_params) != *x.label) ++wrong;
            }
            val_error = static_cast<double>(wrong) / static_cast<double>(val.size());
        } catch (const DivergedError&) {
            val_error = std::numeric_limits<double>::infinity();  // unusable grid point
        }
        if (first || val_error < best_error ||
            (val_error == best_error && lambda > best_lambda)) {
            best_error = val_error;
            best_lambda = lambda;
            first = false;
        }
    }
    return best_lambda;
}

}  // namespace hulm

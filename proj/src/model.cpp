#include "hulm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "hulm/rng.hpp"

namespace hulm {

HulmParams HulmParams::zeros(int hidden, int dim, int classes) {
    HulmParams theta;
    theta.pi = Eigen::VectorXd::Zero(hidden);
    theta.tau = Eigen::VectorXd::Zero(hidden);
    theta.A = Eigen::VectorXd::Zero(hidden);
    theta.b = Eigen::VectorXd::Zero(hidden);
    theta.c = Eigen::VectorXd::Zero(classes);
    theta.W = Eigen::MatrixXd::Zero(hidden, dim);
    theta.V = Eigen::MatrixXd::Zero(hidden, classes);
    return theta;
}

std::array<ParamBlock, 7> param_blocks(HulmParams& theta) {
    return {{{"pi", theta.pi.data(), theta.pi.size()},
             {"tau", theta.tau.data(), theta.tau.size()},
             {"A", theta.A.data(), theta.A.size()},
             {"b", theta.b.data(), theta.b.size()},
             {"c", theta.c.data(), theta.c.size()},
             {"W", theta.W.data(), theta.W.size()},
             {"V", theta.V.data(), theta.V.size()}}};
}

void check_params_consistent(const HulmParams& theta) {
    const Eigen::Index hidden = theta.pi.size();
    if (theta.tau.size() != hidden || theta.A.size() != hidden || theta.b.size() != hidden ||
        theta.W.rows() != hidden || theta.V.rows() != hidden) {
        throw std::invalid_argument("parameter blocks disagree on the number of hidden units");
    }
    if (theta.c.size() != theta.V.cols()) {
        throw std::invalid_argument("c and V disagree on the number of classes");
    }
}

namespace {

void check_energy_dims(const TimeSeries& x, const HiddenAssignment& z, const LabelVector& y,
                       const HulmParams& theta) {
    check_params_consistent(theta);
    if (x.length() < 1) throw std::invalid_argument("series must have at least one frame");
    if (x.dim() != theta.dim()) {
        throw std::invalid_argument("series dimension " + std::to_string(x.dim()) +
                                    " does not match model dimension " +
                                    std::to_string(theta.dim()));
    }
    if (z.length() != x.length() || z.hidden() != theta.hidden()) {
        throw std::invalid_argument("hidden assignment shape does not match series/model");
    }
    if (y.num_classes() != theta.classes()) {
        throw std::invalid_argument("label alphabet does not match model classes");
    }
}

}  // namespace

double energy(const TimeSeries& x, const HiddenAssignment& z, const LabelVector& y,
              const HulmParams& theta) {
    check_energy_dims(x, z, y, theta);
    const Eigen::Index len = x.length();
    const Eigen::Index hidden = theta.hidden();
    const int label = y.index();

    double e = theta.c(label);
    for (Eigen::Index h = 0; h < hidden; ++h) {
        e += z.z(0, h) * theta.pi(h) + z.z(len - 1, h) * theta.tau(h);
    }
    for (Eigen::Index t = 1; t < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            e += z.z(t - 1, h) * z.z(t, h) * theta.A(h);
        }
    }
    for (Eigen::Index t = 0; t < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            if (z.z(t, h) == 0) continue;
            e += theta.W.row(h).dot(x.frames.row(t)) + theta.V(h, label) + theta.b(h);
        }
    }
    return e;
}

double log_potential(Eigen::Index t, Eigen::Index h, int k_prev, int k,
                     const Eigen::VectorXd& x_t, const LabelVector& y,
                     const HulmParams& theta, Eigen::Index seq_len) {
    check_params_consistent(theta);
    if (t < 0 || t >= seq_len) throw std::invalid_argument("time index out of range");
    if (h < 0 || h >= theta.hidden()) throw std::invalid_argument("chain index out of range");
    if ((k_prev & ~1) != 0 || (k & ~1) != 0) {
        throw std::invalid_argument("hidden states must be 0 or 1");
    }
    if (x_t.size() != theta.dim()) throw std::invalid_argument("frame dimension mismatch");
    if (y.num_classes() != theta.classes()) {
        throw std::invalid_argument("label alphabet does not match model classes");
    }
    if (k == 0) return 0.0;

    const int kp = (t == 0) ? 0 : k_prev;  // virtual all-zero step before the sequence
    double value = kp * theta.A(h) + theta.W.row(h).dot(x_t) + theta.V(h, y.index()) + theta.b(h);
    if (t == 0) value += theta.pi(h);
    if (t == seq_len - 1) value += theta.tau(h);
    return value;
}

HulmParams init_params(int hidden, int dim, int classes, std::uint64_t seed) {
    if (hidden < 1 || dim < 1 || classes < 1) {
        throw std::invalid_argument("init_params requires hidden, dim, classes >= 1");
    }
    HulmParams theta = HulmParams::zeros(hidden, dim, classes);
    Rng rng(seed);
    const double stddev = std::sqrt(1e-3);
    for (Eigen::Index h = 0; h < hidden; ++h) theta.A(h) = rng.gaussian(0.0, stddev);
    for (Eigen::Index h = 0; h < hidden; ++h)
        for (Eigen::Index d = 0; d < dim; ++d) theta.W(h, d) = rng.gaussian(0.0, stddev);
    for (Eigen::Index h = 0; h < hidden; ++h)
        for (Eigen::Index k = 0; k < classes; ++k) theta.V(h, k) = rng.gaussian(0.0, stddev);
    return theta;
}

}  // namespace hulm

#include "hulm/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace hulm {

namespace {

void check_inference_dims(const TimeSeries& x, const HulmParams& theta) {
    check_params_consistent(theta);
    if (x.length() < 1) throw std::invalid_argument("series must have at least one frame");
    if (x.dim() != theta.dim()) {
        throw std::invalid_argument("series dimension " + std::to_string(x.dim()) +
                                    " does not match model dimension " +
                                    std::to_string(theta.dim()));
    }
}

// State-1 local field per (t, h) before any label contribution:
// W_h . x_t + b_h, with pi folded into the first row and tau into the last.
Eigen::MatrixXd base_fields(const TimeSeries& x, const HulmParams& theta) {
    Eigen::MatrixXd u = x.frames * theta.W.transpose();
    u.rowwise() += theta.b.transpose();
    u.row(0) += theta.pi.transpose();
    u.row(u.rows() - 1) += theta.tau.transpose();
    return u;
}

Eigen::MatrixXd label_fields(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    if (y.num_classes() != theta.classes()) {
        throw std::invalid_argument("label alphabet does not match model classes");
    }
    Eigen::MatrixXd u = base_fields(x, theta);
    u.rowwise() += theta.V.col(y.index()).transpose();
    if (!u.allFinite()) throw NumericError("potential overflowed double range");
    return u;
}

// Each chain carries two states; state 0 contributes nothing, so the whole
// recursion reduces to the local field u(t, h) and the transition weight A_h.
Grid3 forward_from(const Eigen::MatrixXd& u, const Eigen::VectorXd& a) {
    const Eigen::Index len = u.rows();
    const Eigen::Index hidden = u.cols();
    Grid3 alpha(len, hidden, 2);
    for (Eigen::Index h = 0; h < hidden; ++h) {
        alpha(0, h, 0) = 0.0;  // entered from the all-zero virtual step
        alpha(0, h, 1) = u(0, h);
    }
    for (Eigen::Index t = 1; t < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            const double a0 = alpha(t - 1, h, 0);
            const double a1 = alpha(t - 1, h, 1);
            alpha(t, h, 0) = log_sum_exp(a0, a1);
            alpha(t, h, 1) = u(t, h) + log_sum_exp(a0, a1 + a(h));
        }
    }
    return alpha;
}

Grid3 backward_from(const Eigen::MatrixXd& u, const Eigen::VectorXd& a) {
    const Eigen::Index len = u.rows();
    const Eigen::Index hidden = u.cols();
    Grid3 beta(len, hidden, 2, 0.0);  // log beta at the last step is 0
    for (Eigen::Index t = len - 2; t >= 0; --t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            const double b0 = beta(t + 1, h, 0);
            const double b1 = beta(t + 1, h, 1) + u(t + 1, h);
            beta(t, h, 0) = log_sum_exp(b0, b1);
            beta(t, h, 1) = log_sum_exp(b0, b1 + a(h));
        }
    }
    return beta;
}

Eigen::VectorXd chain_sums(const Grid3& alpha) {
    const Eigen::Index len = alpha.dim1();
    Eigen::VectorXd sums(alpha.dim2());
    for (Eigen::Index h = 0; h < alpha.dim2(); ++h) {
        sums(h) = log_sum_exp(alpha(len - 1, h, 0), alpha(len - 1, h, 1));
    }
    if (!sums.allFinite()) throw NumericError("chain sum overflowed double range");
    return sums;
}

}  // namespace

Grid3 forward(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    check_inference_dims(x, theta);
    return forward_from(label_fields(x, y, theta), theta.A);
}

Grid3 backward(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    check_inference_dims(x, theta);
    return backward_from(label_fields(x, y, theta), theta.A);
}

MessageTable messages(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    check_inference_dims(x, theta);
    MessageTable table;
    table.local = label_fields(x, y, theta);
    table.log_alpha = forward_from(table.local, theta.A);
    table.log_beta = backward_from(table.local, theta.A);
    table.log_chain = chain_sums(table.log_alpha);
    return table;
}

double log_m(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    check_inference_dims(x, theta);
    const Grid3 alpha = forward_from(label_fields(x, y, theta), theta.A);
    return theta.c(y.index()) + chain_sums(alpha).sum();
}

Eigen::VectorXd all_label_log_m(const TimeSeries& x, const HulmParams& theta) {
    check_inference_dims(x, theta);
    const Eigen::MatrixXd base = base_fields(x, theta);
    const int classes = static_cast<int>(theta.classes());
    Eigen::VectorXd values(classes);
    for (int k = 0; k < classes; ++k) {
        Eigen::MatrixXd u = base;
        u.rowwise() += theta.V.col(k).transpose();
        if (!u.allFinite()) throw NumericError("potential overflowed double range");
        values(k) = theta.c(k) + chain_sums(forward_from(u, theta.A)).sum();
    }
    return values;
}

Eigen::VectorXd predict_distribution(const TimeSeries& x, const HulmParams& theta) {
    const Eigen::VectorXd scores = all_label_log_m(x, theta);
    const Eigen::VectorXd shifted = (scores.array() - scores.maxCoeff()).exp();
    return shifted / shifted.sum();
}

int predict_label(const TimeSeries& x, const HulmParams& theta) {
    const Eigen::VectorXd p = predict_distribution(x, theta);
    int best = 0;
    for (int k = 1; k < p.size(); ++k) {
        if (p(k) > p(best)) best = k;
    }
    return best;
}

Marginals marginals(const MessageTable& msgs, const HulmParams& theta) {
    const Eigen::Index len = msgs.log_alpha.dim1();
    const Eigen::Index hidden = msgs.log_alpha.dim2();
    Marginals result;
    result.gamma = Grid3(len, hidden, 2);
    result.xi = Grid4(len - 1, hidden, 2, 2);

    for (Eigen::Index t = 0; t < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            for (int k = 0; k < 2; ++k) {
                result.gamma(t, h, k) = std::exp(msgs.log_alpha(t, h, k) +
                                                 msgs.log_beta(t, h, k) - msgs.log_chain(h));
            }
        }
    }
    for (Eigen::Index t = 0; t + 1 < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    // potential between t and t+1, evaluated at x_{t+1}
                    const double step = k * l * theta.A(h) + l * msgs.local(t + 1, h);
                    result.xi(t, h, k, l) = std::exp(msgs.log_alpha(t, h, k) + step +
                                                     msgs.log_beta(t + 1, h, l) -
                                                     msgs.log_chain(h));
                }
            }
        }
    }
    return result;
}

Marginals marginals(const TimeSeries& x, const LabelVector& y, const HulmParams& theta) {
    return marginals(messages(x, y, theta), theta);
}

}  // namespace hulm

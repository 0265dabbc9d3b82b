#pragma once

#include <Eigen/Core>

#include "hulm/model.hpp"
#include "hulm/numeric.hpp"
#include "hulm/types.hpp"

namespace hulm {

/// Log-domain forward/backward messages for one (series, label) pair.
///
/// log_alpha(t, h, k): score mass of chain h ending in state k at step t,
/// accumulated from the left. log_beta(t, h, k): remaining mass to the right,
/// with log_beta(T-1, h, k) = 0. log_chain(h) = logsumexp_k log_alpha(T-1, h, k)
/// is chain h's full sum; alpha(t)*beta(t) reproduces it at every t.
///
/// local(t, h) caches the state-1 local field (W_h.x_t + V_h.y + b_h plus
/// boundary biases), which together with A is enough to rebuild any potential;
/// marginal extraction reuses it.
struct MessageTable {
    Grid3 log_alpha;           // T x H x 2
    Grid3 log_beta;            // T x H x 2
    Eigen::VectorXd log_chain; // H
    Eigen::MatrixXd local;     // T x H
};

/// Posterior marginals of the hidden units for one (series, label) pair,
/// in probability domain.
///
///   gamma(t, h, k)  = P(z_{t,h} = k | x, y)
///   xi(t, h, k, l)  = P(z_{t,h} = k, z_{t+1,h} = l | x, y)
///
/// xi has T-1 leading slots and is empty when T = 1.
struct Marginals {
    Grid3 gamma;  // T x H x 2
    Grid4 xi;     // (T-1) x H x 2 x 2
};

/// Forward recursion. log alpha(0,h,k) is the t=0 potential entered from the
/// all-zero virtual state; later steps fold the transition in log domain:
///   log alpha(t,h,k) = logsumexp_i [log psi_t(i,k) + log alpha(t-1,h,i)].
/// Throws NumericError if a potential overflows double range.
Grid3 forward(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

/// Backward recursion, mirrored: log beta(T-1,h,k) = 0 and the potential
/// consumed between steps t and t+1 is the one evaluated at x_{t+1}.
Grid3 backward(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

/// Both message sets plus per-chain totals in one pass.
MessageTable messages(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

/// log of the label-conditional configuration sum:
///   c'y + sum_h logsumexp_k log alpha(T-1, h, k).
double log_m(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

/// log_m for every label at once; shares the input projection across labels.
Eigen::VectorXd all_label_log_m(const TimeSeries& x, const HulmParams& theta);

/// Posterior over classes: softmax of all_label_log_m. Sums to 1, entries
/// in (0, 1).
Eigen::VectorXd predict_distribution(const TimeSeries& x, const HulmParams& theta);

/// Argmax class of predict_distribution; ties break to the lowest index.
int predict_label(const TimeSeries& x, const HulmParams& theta);

/// Node and edge marginals from a finished message table.
Marginals marginals(const MessageTable& msgs, const HulmParams& theta);
Marginals marginals(const TimeSeries& x, const LabelVector& y, const HulmParams& theta);

}  // namespace hulm

#pragma once

#include <hulm/model.hpp>
#include <hulm/rng.hpp>
#include <hulm/types.hpp>

namespace testutil {

inline hulm::HulmParams random_params(hulm::Rng& rng, int hidden, int dim, int classes,
                                      double lo = -0.5, double hi = 0.5) {
    hulm::HulmParams theta = hulm::HulmParams::zeros(hidden, dim, classes);
    for (hulm::ParamBlock& block : hulm::param_blocks(theta)) {
        for (Eigen::Index i = 0; i < block.size; ++i) block.data[i] = rng.uniform(lo, hi);
    }
    return theta;
}

inline hulm::TimeSeries random_series(hulm::Rng& rng, int len, int dim, double lo = -1.0,
                                      double hi = 1.0) {
    hulm::TimeSeries x;
    x.frames.resize(len, dim);
    for (int t = 0; t < len; ++t) {
        for (int d = 0; d < dim; ++d) x.frames(t, d) = rng.uniform(lo, hi);
    }
    return x;
}

inline bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline hulm::HiddenAssignment assignment_from_bits(std::uint64_t mask, int len, int hidden) {
    hulm::HiddenAssignment z;
    z.z.resize(len, hidden);
    for (int t = 0; t < len; ++t) {
        for (int h = 0; h < hidden; ++h) {
            z.z(t, h) = static_cast<int>((mask >> (t * hidden + h)) & 1ull);
        }
    }
    return z;
}

/// Two-class set separable by the frame sum: class k's frames center on
/// k-dependent means, so even the naive model can drive training error to 0.
inline hulm::Dataset mean_shift_task(int n_per_class, int len, std::uint64_t seed) {
    hulm::Dataset data;
    data.num_classes = 2;
    data.dim = 2;
    hulm::Rng rng(seed);
    for (int label = 0; label < 2; ++label) {
        for (int n = 0; n < n_per_class; ++n) {
            hulm::TimeSeries x;
            x.label = label;
            x.frames.resize(len, 2);
            for (int t = 0; t < len; ++t) {
                x.frames(t, 0) = (label == 0 ? 1.0 : -1.0) + rng.gaussian(0.0, 0.3);
                x.frames(t, 1) = rng.gaussian(0.0, 0.3);
            }
            data.series.push_back(std::move(x));
        }
    }
    return data;
}

}  // namespace testutil

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>

#include "hulm/types.hpp"

namespace hulm {

/// Full parameter set of the hidden-unit logistic model with H hidden chains,
/// D input features and K classes:
///
///   pi, tau  length-H boundary biases for the first and last step
///   A        length-H per-chain transition weight (chains never couple)
///   W        H x D input weights
///   V        H x K label weights
///   b        length-H hidden bias
///   c        length-K label bias
struct HulmParams {
    Eigen::VectorXd pi, tau, A, b, c;
    Eigen::MatrixXd W, V;

    Eigen::Index hidden() const { return pi.size(); }
    Eigen::Index dim() const { return W.cols(); }
    Eigen::Index classes() const { return c.size(); }

    static HulmParams zeros(int hidden, int dim, int classes);
};

/// One full configuration of the hidden units, z(t, h) in {0, 1}.
struct HiddenAssignment {
    Eigen::MatrixXi z;  // T x H

    Eigen::Index length() const { return z.rows(); }
    Eigen::Index hidden() const { return z.cols(); }
};

/// A named view over one parameter (or gradient) block.
struct ParamBlock {
    const char* name;
    double* data;
    Eigen::Index size;
};

/// The seven parameter blocks in a fixed order (pi, tau, A, b, c, W, V).
/// Gradient exposes the same order, so flat coordinate indices line up.
std::array<ParamBlock, 7> param_blocks(HulmParams& theta);

/// Throws std::invalid_argument unless all blocks agree on H, D, K.
void check_params_consistent(const HulmParams& theta);

/// Log-linear score of a complete (series, assignment, label) configuration:
///
///   E = z_1'pi + z_T'tau + c'y + sum_{t>=2} z_{t-1}'diag(A) z_t
///       + sum_t [z_t'W x_t + z_t'V y + z_t'b]
///
/// For T = 1 both pi and tau act on the single step and the transition sum
/// is empty.
double energy(const TimeSeries& x, const HiddenAssignment& z, const LabelVector& y,
              const HulmParams& theta);

/// Log of the local potential tying steps t-1 and t of chain h:
///
///   k_prev * A_h * k + k * (W_h . x_t + V_h . y + b_h)
///
/// plus k * pi_h at t == 0 and k * tau_h at t == T-1 (both when T == 1).
/// The label bias c'y is deliberately not included; it enters once per
/// (series, label) pair in log_m. t is 0-based; k_prev is ignored at t == 0
/// (the virtual step before the sequence is all-zero).
double log_potential(Eigen::Index t, Eigen::Index h, int k_prev, int k,
                     const Eigen::VectorXd& x_t, const LabelVector& y,
                     const HulmParams& theta, Eigen::Index seq_len);

/// Fresh parameters: A, W, V ~ Gaussian(0, variance 1e-3); pi, tau, b, c zero.
/// Bit-identical for identical seeds.
HulmParams init_params(int hidden, int dim, int classes, std::uint64_t seed);

/// Writes/reads the versioned model document (format_version 1). See
/// README for the field list. save is lossless: numbers round-trip exactly.
void save_hulm(const HulmParams& theta, const std::string& path);
HulmParams load_hulm(const std::string& path);

}  // namespace hulm

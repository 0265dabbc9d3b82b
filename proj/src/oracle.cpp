#include "hulm/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hulm/numeric.hpp"

namespace hulm {

namespace {

std::uint64_t checked_state_count(const TimeSeries& x, const HulmParams& theta,
                                  const OracleBudget& budget) {
    const std::uint64_t bits =
        static_cast<std::uint64_t>(x.length()) * static_cast<std::uint64_t>(theta.hidden());
    if (bits >= 63 || (1ull << bits) > budget.max_states) {
        throw BudgetError("enumeration of 2^" + std::to_string(bits) +
                          " hidden states exceeds the oracle budget");
    }
    return 1ull << bits;
}

HiddenAssignment assignment_from_bits(std::uint64_t mask, Eigen::Index len, Eigen::Index hidden) {
    HiddenAssignment z;
    z.z.resize(len, hidden);
    for (Eigen::Index t = 0; t < len; ++t) {
        for (Eigen::Index h = 0; h < hidden; ++h) {
            z.z(t, h) = static_cast<int>((mask >> (t * hidden + h)) & 1ull);
        }
    }
    return z;
}

std::vector<double> all_energies(const TimeSeries& x, const LabelVector& y,
                                 const HulmParams& theta, std::uint64_t states) {
    std::vector<double> energies(states);
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        energies[mask] = energy(x, assignment_from_bits(mask, x.length(), theta.hidden()), y, theta);
    }
    return energies;
}

}  // namespace

double brute_log_m(const TimeSeries& x, const LabelVector& y, const HulmParams& theta,
                   const OracleBudget& budget) {
    const std::uint64_t states = checked_state_count(x, theta, budget);
    return log_sum_exp(all_energies(x, y, theta, states));
}

Marginals brute_marginals(const TimeSeries& x, const LabelVector& y, const HulmParams& theta,
                          const OracleBudget& budget) {
    const std::uint64_t states = checked_state_count(x, theta, budget);
    const std::vector<double> energies = all_energies(x, y, theta, states);
    const double log_total = log_sum_exp(energies);

    const Eigen::Index len = x.length();
    const Eigen::Index hidden = theta.hidden();
    Marginals result;
    result.gamma = Grid3(len, hidden, 2);
    result.xi = Grid4(len - 1, hidden, 2, 2);

    for (std::uint64_t mask = 0; mask < states; ++mask) {
        const double weight = std::exp(energies[mask] - log_total);
        const HiddenAssignment z = assignment_from_bits(mask, len, hidden);
        for (Eigen::Index t = 0; t < len; ++t) {
            for (Eigen::Index h = 0; h < hidden; ++h) {
                result.gamma(t, h, z.z(t, h)) += weight;
            }
        }
        for (Eigen::Index t = 0; t + 1 < len; ++t) {
            for (Eigen::Index h = 0; h < hidden; ++h) {
                result.xi(t, h, z.z(t, h), z.z(t + 1, h)) += weight;
            }
        }
    }
    return result;
}

Gradient finite_diff_gradient(const TimeSeries& x, const LabelVector& y,
                              const HulmParams& theta, double step) {
    if (step == 0.0 || !std::isfinite(step)) {
        throw std::invalid_argument("finite-difference step must be finite and nonzero");
    }
    check_params_consistent(theta);

    // Single-example unregularized conditional log-likelihood.
    const auto objective = [&x, &y](const HulmParams& params) {
        const Eigen::VectorXd scores = all_label_log_m(x, params);
        return scores(y.index()) - log_sum_exp(std::span<const double>(scores.data(),
                                                                       scores.size()));
    };

    HulmParams probe = theta;
    Gradient grad = Gradient::zeros(static_cast<int>(theta.hidden()),
                                    static_cast<int>(theta.dim()),
                                    static_cast<int>(theta.classes()));
    auto probe_blocks = param_blocks(probe);
    auto grad_blocks = param_blocks(grad);
    for (std::size_t blk = 0; blk < probe_blocks.size(); ++blk) {
        for (Eigen::Index i = 0; i < probe_blocks[blk].size; ++i) {
            double& coord = probe_blocks[blk].data[i];
            const double saved = coord;
            coord = saved + step;
            const double hi = objective(probe);
            coord = saved - step;
            const double lo = objective(probe);
            coord = saved;
            grad_blocks[blk].data[i] = (hi - lo) / (2.0 * step);
        }
    }
    return grad;
}

}  // namespace hulm

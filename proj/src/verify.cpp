#include "hulm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hulm/inference.hpp"
#include "hulm/rng.hpp"

namespace hulm {

namespace {

struct Instance {
    TimeSeries x;
    int label;
    HulmParams theta;
};

HulmParams random_params(Rng& rng, int hidden, int dim, int classes) {
    HulmParams theta = HulmParams::zeros(hidden, dim, classes);
    for (ParamBlock& block : param_blocks(theta)) {
        for (Eigen::Index i = 0; i < block.size; ++i) block.data[i] = rng.uniform(-0.5, 0.5);
    }
    return theta;
}

Instance random_instance(Rng& rng, const VerifyOptions& opt, int min_classes) {
    Instance inst;
    const int hidden = 1 + static_cast<int>(rng.below(opt.max_hidden));
    const int len = 1 + static_cast<int>(rng.below(opt.max_len));
    const int dim = 1 + static_cast<int>(rng.below(opt.max_dim));
    const int classes =
        min_classes + static_cast<int>(rng.below(opt.max_classes - min_classes + 1));
    inst.theta = random_params(rng, hidden, dim, classes);
    inst.x.frames.resize(len, dim);
    for (int t = 0; t < len; ++t) {
        for (int d = 0; d < dim; ++d) inst.x.frames(t, d) = rng.uniform(-1.0, 1.0);
    }
    inst.label = static_cast<int>(rng.below(classes));
    return inst;
}

std::string format_worst(double worst, double tol, const std::string& extra = "") {
    std::ostringstream out;
    out.setf(std::ios::scientific);
    out.precision(2);
    out << "worst " << worst << ", tolerance " << tol;
    if (!extra.empty()) out << ", " << extra;
    return out.str();
}

CheckResult check_log_m(const VerifyOptions& opt, Rng& rng) {
    CheckResult result{"oracle-log-m", false, 0.0, opt.log_m_rel_tol, ""};
    for (int trial = 0; trial < opt.oracle_trials; ++trial) {
        const Instance inst = random_instance(rng, opt, 1);
        const LabelVector y(inst.label, static_cast<int>(inst.theta.classes()));
        const double reference = brute_log_m(inst.x, y, inst.theta, opt.budget);
        const double fast = log_m(inst.x, y, inst.theta);
        const double rel = std::abs(fast - reference) / std::max(1.0, std::abs(reference));
        result.worst = std::max(result.worst, rel);
    }
    result.passed = result.worst <= result.tolerance;
    result.detail = format_worst(result.worst, result.tolerance,
                                 std::to_string(opt.oracle_trials) + " instances");
    return result;
}

CheckResult check_marginals(const VerifyOptions& opt, Rng& rng) {
    CheckResult result{"oracle-marginals", false, 0.0, opt.marginal_abs_tol, ""};
    for (int trial = 0; trial < opt.oracle_trials; ++trial) {
        const Instance inst = random_instance(rng, opt, 1);
        const LabelVector y(inst.label, static_cast<int>(inst.theta.classes()));
        const Marginals fast = marginals(inst.x, y, inst.theta);
        const Marginals reference = brute_marginals(inst.x, y, inst.theta, opt.budget);
        const Eigen::Index len = inst.x.length();
        const Eigen::Index hidden = inst.theta.hidden();

        for (Eigen::Index t = 0; t < len; ++t) {
            for (Eigen::Index h = 0; h < hidden; ++h) {
                for (int k = 0; k < 2; ++k) {
                    result.worst = std::max(
                        result.worst,
                        std::abs(fast.gamma(t, h, k) - reference.gamma(t, h, k)));
                }
            }
        }
        for (Eigen::Index t = 0; t + 1 < len; ++t) {
            for (Eigen::Index h = 0; h < hidden; ++h) {
                for (int k = 0; k < 2; ++k) {
                    for (int l = 0; l < 2; ++l) {
                        result.worst = std::max(
                            result.worst,
                            std::abs(fast.xi(t, h, k, l) - reference.xi(t, h, k, l)));
                    }
                }
            }
        }
        // xi row/column sums must reproduce gamma at both endpoints
        for (Eigen::Index t = 0; t + 1 < len; ++t) {
            for (Eigen::Index h = 0; h < hidden; ++h) {
                for (int k = 0; k < 2; ++k) {
                    const double row = fast.xi(t, h, k, 0) + fast.xi(t, h, k, 1);
                    const double col = fast.xi(t, h, 0, k) + fast.xi(t, h, 1, k);
                    result.worst =
                        std::max(result.worst, std::abs(row - fast.gamma(t, h, k)));
                    result.worst =
                        std::max(result.worst, std::abs(col - fast.gamma(t + 1, h, k)));
                }
            }
        }
    }
    result.passed = result.worst <= result.tolerance;
    result.detail = format_worst(result.worst, result.tolerance,
                                 std::to_string(opt.oracle_trials) + " instances");
    return result;
}

CheckResult check_gradient(const VerifyOptions& opt, Rng& rng) {
    CheckResult result{"gradient-finite-diff", false, 0.0, opt.grad_rel_tol, ""};
    std::string worst_block = "-";
    for (int trial = 0; trial < opt.gradient_trials; ++trial) {
        // classes >= 2 so the label posterior is informative
        const Instance inst = random_instance(rng, opt, 2);
        const LabelVector y(inst.label, static_cast<int>(inst.theta.classes()));
        Gradient analytic = gradient_example(inst.x, y, inst.theta);
        if (opt.gradient_tamper) opt.gradient_tamper(analytic);
        Gradient numeric = finite_diff_gradient(inst.x, y, inst.theta, opt.fd_step);

        auto a_blocks = param_blocks(analytic);
        auto n_blocks = param_blocks(numeric);
        for (std::size_t blk = 0; blk < a_blocks.size(); ++blk) {
            for (Eigen::Index i = 0; i < a_blocks[blk].size; ++i) {
                const double a = a_blocks[blk].data[i];
                const double n = n_blocks[blk].data[i];
                const double scale = std::max(
                    {std::abs(a), std::abs(n), opt.grad_abs_floor / opt.grad_rel_tol});
                const double rel = std::abs(a - n) / scale;
                if (rel > result.worst) {
                    result.worst = rel;
                    worst_block = a_blocks[blk].name;
                }
            }
        }
    }
    result.passed = result.worst <= result.tolerance;
    result.detail = format_worst(result.worst, result.tolerance,
                                 "worst block " + worst_block + ", " +
                                     std::to_string(opt.gradient_trials) + " instances");
    return result;
}

CheckResult check_normalization(const VerifyOptions& opt, Rng& rng) {
    CheckResult result{"normalization", false, 0.0, opt.normalization_tol, ""};
    for (int trial = 0; trial < opt.normalization_trials; ++trial) {
        Instance inst = random_instance(rng, opt, 1);
        // force the edge cases into the mix
        if (trial % 5 == 1) inst.x.frames.conservativeResize(1, inst.x.dim());
        if (trial % 5 == 2) {
            inst.theta = random_params(rng, 1, static_cast<int>(inst.theta.dim()),
                                       static_cast<int>(inst.theta.classes()));
        }
        const Eigen::VectorXd p = predict_distribution(inst.x, inst.theta);
        result.worst = std::max(result.worst, std::abs(p.sum() - 1.0));
    }
    result.passed = result.worst <= result.tolerance;
    result.detail = format_worst(result.worst, result.tolerance,
                                 std::to_string(opt.normalization_trials) + " inputs");
    return result;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    const std::uint64_t bits = static_cast<std::uint64_t>(options.max_hidden) *
                               static_cast<std::uint64_t>(options.max_len);
    if (bits >= 63 || (1ull << bits) > options.budget.max_states) {
        throw BudgetError("verification instance family 2^" + std::to_string(bits) +
                          " exceeds the oracle budget");
    }

    std::vector<CheckResult> results;
    Rng rng(options.seed);
    results.push_back(check_log_m(options, rng));
    results.push_back(check_marginals(options, rng));
    results.push_back(check_gradient(options, rng));
    results.push_back(check_normalization(options, rng));
    return results;
}

}  // namespace hulm

#include <doctest.h>

#include <cmath>
#include <vector>

#include <hulm/numeric.hpp>
#include <hulm/oracle.hpp>
#include <hulm/rng.hpp>

#include "helpers.hpp"

using namespace hulm;

TEST_CASE("brute_log_m: zero parameters count every state equally") {
    const int hidden = 3, len = 4;
    const HulmParams theta = HulmParams::zeros(hidden, 2, 2);
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(len, 2);
    CHECK(brute_log_m(x, LabelVector(0, 2), theta) ==
          doctest::Approx(hidden * len * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("brute_log_m: two-state closed form at H = T = 1") {
    Rng rng(11);
    const HulmParams theta = testutil::random_params(rng, 1, 2, 3);
    const TimeSeries x = testutil::random_series(rng, 1, 2);
    const int k = 2;
    const double on = theta.pi(0) + theta.tau(0) + theta.c(k) +
                      theta.W.row(0).dot(x.frames.row(0)) + theta.V(0, k) + theta.b(0);
    const double expected = std::log(std::exp(theta.c(k)) + std::exp(on));
    CHECK(brute_log_m(x, LabelVector(k, 3), theta) ==
          doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("brute force refuses instances over the state budget") {
    const HulmParams theta = HulmParams::zeros(5, 1, 2);
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(5, 1);
    OracleBudget budget;
    budget.max_states = 1u << 20;
    CHECK_THROWS_AS(brute_log_m(x, LabelVector(0, 2), theta, budget), BudgetError);
    budget.max_states = 1u << 25;
    CHECK_NOTHROW(brute_log_m(x, LabelVector(0, 2), theta, budget));
}

TEST_CASE("brute_log_m is invariant under chain relabeling") {
    Rng rng(12);
    const HulmParams theta = testutil::random_params(rng, 3, 2, 2);
    const TimeSeries x = testutil::random_series(rng, 3, 2);
    const LabelVector y(1, 2);

    HulmParams permuted = theta;
    const int perm[3] = {2, 0, 1};
    for (int h = 0; h < 3; ++h) {
        permuted.pi(h) = theta.pi(perm[h]);
        permuted.tau(h) = theta.tau(perm[h]);
        permuted.A(h) = theta.A(perm[h]);
        permuted.b(h) = theta.b(perm[h]);
        permuted.W.row(h) = theta.W.row(perm[h]);
        permuted.V.row(h) = theta.V.row(perm[h]);
    }
    CHECK(brute_log_m(x, y, theta) == doctest::Approx(brute_log_m(x, y, permuted)).epsilon(1e-13));
}

TEST_CASE("enumeration order does not move the total beyond 1e-12") {
    Rng rng(13);
    const int hidden = 2, len = 3;
    const HulmParams theta = testutil::random_params(rng, hidden, 2, 2, -1.5, 1.5);
    const TimeSeries x = testutil::random_series(rng, len, 2);
    const LabelVector y(0, 2);

    // reversed-order running accumulation as an independent reduction
    double running = -std::numeric_limits<double>::infinity();
    const std::uint64_t states = 1ull << (hidden * len);
    for (std::uint64_t mask = states; mask-- > 0;) {
        const HiddenAssignment z = testutil::assignment_from_bits(mask, len, hidden);
        running = log_sum_exp(running, energy(x, z, y, theta));
    }
    CHECK(std::abs(brute_log_m(x, y, theta) - running) <= 1e-12);
}

TEST_CASE("brute_marginals: zero parameters give uniform marginals") {
    const HulmParams theta = HulmParams::zeros(2, 1, 2);
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(3, 1);
    const Marginals m = brute_marginals(x, LabelVector(0, 2), theta);
    for (int t = 0; t < 3; ++t) {
        for (int h = 0; h < 2; ++h) {
            for (int k = 0; k < 2; ++k) {
                CHECK(m.gamma(t, h, k) == doctest::Approx(0.5).epsilon(1e-12));
            }
        }
    }
    for (int t = 0; t < 2; ++t) {
        for (int h = 0; h < 2; ++h) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    CHECK(m.xi(t, h, k, l) == doctest::Approx(0.25).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("brute_marginals: a strongly label-tied unit saturates") {
    HulmParams theta = HulmParams::zeros(2, 1, 2);
    theta.V(1, 0) = 40.0;
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(3, 1);
    const Marginals m = brute_marginals(x, LabelVector(0, 2), theta);
    for (int t = 0; t < 3; ++t) CHECK(m.gamma(t, 1, 1) >= 1.0 - 1e-6);
}

TEST_CASE("brute_marginals satisfy the edge-consistency identities") {
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const int hidden = 1 + static_cast<int>(rng.below(3));
        const int len = 1 + static_cast<int>(rng.below(4));
        const HulmParams theta = testutil::random_params(rng, hidden, 2, 2);
        const TimeSeries x = testutil::random_series(rng, len, 2);
        const Marginals m = brute_marginals(x, LabelVector(0, 2), theta);
        for (int t = 0; t < len; ++t) {
            for (int h = 0; h < hidden; ++h) {
                CHECK(m.gamma(t, h, 0) + m.gamma(t, h, 1) == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
        for (int t = 0; t + 1 < len; ++t) {
            for (int h = 0; h < hidden; ++h) {
                for (int k = 0; k < 2; ++k) {
                    CHECK(m.xi(t, h, k, 0) + m.xi(t, h, k, 1) ==
                          doctest::Approx(m.gamma(t, h, k)).epsilon(1e-9));
                    CHECK(m.xi(t, h, 0, k) + m.xi(t, h, 1, k) ==
                          doctest::Approx(m.gamma(t + 1, h, k)).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("finite differences at zero recover the label-bias gradient") {
    const int classes = 4;
    const HulmParams theta = HulmParams::zeros(2, 2, classes);
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(3, 2);
    const double step = 1e-4;
    const Gradient g = finite_diff_gradient(x, LabelVector(1, classes), theta, step);
    for (int k = 0; k < classes; ++k) {
        const double expected = (k == 1 ? 1.0 : 0.0) - 1.0 / classes;
        CHECK(std::abs(g.d_c(k) - expected) <= 10.0 * step * step);
    }
}

TEST_CASE("finite differences converge at second order") {
    Rng rng(15);
    const HulmParams theta = testutil::random_params(rng, 2, 2, 2);
    const TimeSeries x = testutil::random_series(rng, 3, 2);
    const LabelVector y(0, 2);

    // fine-step result stands in for the exact gradient
    const Gradient exact = finite_diff_gradient(x, y, theta, 1e-6);
    const Gradient coarse = finite_diff_gradient(x, y, theta, 4e-3);
    const Gradient fine = finite_diff_gradient(x, y, theta, 2e-3);

    Gradient exact_mut = exact, coarse_mut = coarse, fine_mut = fine;
    auto eb = param_blocks(exact_mut);
    auto cb = param_blocks(coarse_mut);
    auto fb = param_blocks(fine_mut);
    double err_coarse = 0.0, err_fine = 0.0;
    for (int blk = 0; blk < 7; ++blk) {
        for (Eigen::Index i = 0; i < eb[blk].size; ++i) {
            err_coarse = std::max(err_coarse, std::abs(cb[blk].data[i] - eb[blk].data[i]));
            err_fine = std::max(err_fine, std::abs(fb[blk].data[i] - eb[blk].data[i]));
        }
    }
    // halving the step should cut the error by about 4; allow slack
    CHECK(err_coarse / err_fine == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("finite differences are symmetric in the step sign") {
    Rng rng(16);
    const HulmParams theta = testutil::random_params(rng, 2, 2, 2);
    const TimeSeries x = testutil::random_series(rng, 3, 2);
    const LabelVector y(1, 2);
    CHECK_THROWS_AS(finite_diff_gradient(x, y, theta, 0.0), std::invalid_argument);

    Gradient pos = finite_diff_gradient(x, y, theta, 1e-5);
    Gradient neg = finite_diff_gradient(x, y, theta, -1e-5);
    auto pb = param_blocks(pos);
    auto nb = param_blocks(neg);
    for (int blk = 0; blk < 7; ++blk) {
        for (Eigen::Index i = 0; i < pb[blk].size; ++i) {
            CHECK(pb[blk].data[i] == nb[blk].data[i]);
        }
    }
}

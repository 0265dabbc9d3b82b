#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <hulm/model.hpp>
#include <hulm/rng.hpp>

#include "helpers.hpp"

using namespace hulm;

TEST_CASE("energy: all-zero assignment leaves only the label bias") {
    Rng rng(1);
    const HulmParams theta = testutil::random_params(rng, 3, 2, 4);
    const TimeSeries x = testutil::random_series(rng, 5, 2);
    HiddenAssignment z;
    z.z = Eigen::MatrixXi::Zero(5, 3);
    for (int k = 0; k < 4; ++k) {
        CHECK(energy(x, z, LabelVector(k, 4), theta) == theta.c(k));
    }
}

TEST_CASE("energy: single step, single unit, unit on") {
    Rng rng(2);
    const HulmParams theta = testutil::random_params(rng, 1, 3, 2);
    const TimeSeries x = testutil::random_series(rng, 1, 3);
    HiddenAssignment z;
    z.z = Eigen::MatrixXi::Ones(1, 1);
    const int k = 1;
    const double expected = theta.pi(0) + theta.tau(0) + theta.c(k) +
                            theta.W.row(0).dot(x.frames.row(0)) + theta.V(0, k) + theta.b(0);
    CHECK(energy(x, z, LabelVector(k, 2), theta) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("energy: transition term counts T-1 steps") {
    Rng rng(3);
    HulmParams theta = testutil::random_params(rng, 1, 2, 2);
    TimeSeries x;
    x.frames = Eigen::MatrixXd::Zero(3, 2);
    HiddenAssignment z;
    z.z = Eigen::MatrixXi::Ones(3, 1);
    const int k = 0;
    const double expected = theta.pi(0) + theta.tau(0) + theta.c(k) + 2.0 * theta.A(0) +
                            3.0 * (theta.V(0, k) + theta.b(0));
    CHECK(energy(x, z, LabelVector(k, 2), theta) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("energy rejects mismatched shapes") {
    Rng rng(4);
    const HulmParams theta = testutil::random_params(rng, 2, 3, 2);
    const TimeSeries x = testutil::random_series(rng, 4, 2);  // dim 2 vs model dim 3
    HiddenAssignment z;
    z.z = Eigen::MatrixXi::Zero(4, 2);
    CHECK_THROWS_AS(energy(x, z, LabelVector(0, 2), theta), std::invalid_argument);

    const TimeSeries ok = testutil::random_series(rng, 4, 3);
    HiddenAssignment bad;
    bad.z = Eigen::MatrixXi::Zero(3, 2);  // wrong length
    CHECK_THROWS_AS(energy(ok, bad, LabelVector(0, 2), theta), std::invalid_argument);
}

TEST_CASE("energy is the sum of its per-block contributions") {
    Rng rng(5);
    const HulmParams theta = testutil::random_params(rng, 2, 2, 3);
    const TimeSeries x = testutil::random_series(rng, 4, 2);
    const LabelVector y(1, 3);
    HiddenAssignment z;
    z.z.resize(4, 2);
    for (int t = 0; t < 4; ++t)
        for (int h = 0; h < 2; ++h) z.z(t, h) = static_cast<int>(rng.below(2));

    const double full = energy(x, z, y, theta);
    double sum_of_parts = 0.0;
    for (int blk = 0; blk < 7; ++blk) {
        HulmParams solo = HulmParams::zeros(2, 2, 3);
        auto src_theta = theta;
        auto src = param_blocks(src_theta);
        auto dst = param_blocks(solo);
        for (Eigen::Index i = 0; i < src[blk].size; ++i) dst[blk].data[i] = src[blk].data[i];
        sum_of_parts += energy(x, z, y, solo);
    }
    CHECK(full == doctest::Approx(sum_of_parts).epsilon(1e-12));
}

TEST_CASE("energy with z = 0 ignores every z-coupled parameter") {
    Rng rng(6);
    const TimeSeries x = testutil::random_series(rng, 3, 2);
    HiddenAssignment z;
    z.z = Eigen::MatrixXi::Zero(3, 2);
    const LabelVector y(0, 2);
    const HulmParams a = testutil::random_params(rng, 2, 2, 2);
    HulmParams b = testutil::random_params(rng, 2, 2, 2);
    b.c = a.c;  // only the label bias is shared
    CHECK(energy(x, z, y, a) == energy(x, z, y, b));
}

TEST_CASE("log_potential: off state contributes nothing") {
    Rng rng(7);
    const HulmParams theta = testutil::random_params(rng, 2, 2, 2);
    const Eigen::VectorXd x_t = Eigen::VectorXd::Constant(2, 0.7);
    for (int t : {0, 1, 2}) {
        for (int kp : {0, 1}) {
            CHECK(log_potential(t, 1, kp, 0, x_t, LabelVector(1, 2), theta, 3) == 0.0);
        }
    }
}

TEST_CASE("log_potential: boundary biases fold into the end steps") {
    Rng rng(8);
    HulmParams theta = testutil::random_params(rng, 2, 2, 2);
    theta.V.setZero();
    const Eigen::VectorXd zero_frame = Eigen::VectorXd::Zero(2);
    const LabelVector y(0, 2);

    CHECK(log_potential(0, 1, 0, 1, zero_frame, y, theta, 3) ==
          doctest::Approx(theta.pi(1) + theta.b(1)).epsilon(1e-15));
    // single-step series folds both ends
    CHECK(log_potential(0, 1, 0, 1, zero_frame, y, theta, 1) ==
          doctest::Approx(theta.pi(1) + theta.tau(1) + theta.b(1)).epsilon(1e-15));
    CHECK_THROWS_AS(log_potential(3, 0, 0, 1, zero_frame, y, theta, 3), std::invalid_argument);
    CHECK_THROWS_AS(log_potential(0, 2, 0, 1, zero_frame, y, theta, 3), std::invalid_argument);
    CHECK_THROWS_AS(log_potential(1, 0, 2, 1, zero_frame, y, theta, 3), std::invalid_argument);
}

TEST_CASE("log_potential sums recover the energy over every assignment") {
    Rng rng(9);
    const int shapes[3][2] = {{1, 1}, {2, 3}, {3, 4}};  // (H, T), including the T = 1 fold
    for (const auto& shape : shapes) {
        const int hidden = shape[0], len = shape[1], dim = 2, classes = 2;
        const HulmParams theta = testutil::random_params(rng, hidden, dim, classes);
        const TimeSeries x = testutil::random_series(rng, len, dim);
        const LabelVector y(1, classes);

        for (std::uint64_t mask = 0; mask < (1u << (hidden * len)); ++mask) {
            const HiddenAssignment z = testutil::assignment_from_bits(mask, len, hidden);
            double total = theta.c(y.index());
            for (int t = 0; t < len; ++t) {
                for (int h = 0; h < hidden; ++h) {
                    const int k_prev = t > 0 ? z.z(t - 1, h) : 0;
                    total += log_potential(t, h, k_prev, z.z(t, h),
                                           x.frames.row(t).transpose(), y, theta, len);
                }
            }
            CHECK(total == doctest::Approx(energy(x, z, y, theta)).epsilon(1e-12));
        }
    }
}

TEST_CASE("init_params is deterministic and zeroes the bias blocks") {
    HulmParams a = init_params(4, 3, 2, 123);
    HulmParams b = init_params(4, 3, 2, 123);
    auto blocks_a = param_blocks(a);
    auto blocks_b = param_blocks(b);
    for (int blk = 0; blk < 7; ++blk) {
        for (Eigen::Index i = 0; i < blocks_a[blk].size; ++i) {
            CHECK(blocks_a[blk].data[i] == blocks_b[blk].data[i]);
        }
    }
    CHECK(a.pi.isZero(0));
    CHECK(a.tau.isZero(0));
    CHECK(a.b.isZero(0));
    CHECK(a.c.isZero(0));
    CHECK_FALSE(a.W.isZero(0));

    HulmParams c = init_params(4, 3, 2, 124);
    CHECK((a.W.array() != c.W.array()).any());
}

TEST_CASE("init_params draws W with variance 1e-3") {
    // pool W entries across seeds until we exceed a million samples
    const int hidden = 100, dim = 39, classes = 10;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; count < 1'000'000; ++seed) {
        const HulmParams theta = init_params(hidden, dim, classes, seed);
        sum += theta.W.sum();
        sum_sq += theta.W.array().square().sum();
        count += static_cast<std::size_t>(theta.W.size());
    }
    const double mean = sum / static_cast<double>(count);
    const double variance = sum_sq / static_cast<double>(count) - mean * mean;
    CHECK(variance == doctest::Approx(1e-3).epsilon(0.10));
}

TEST_CASE("model file round-trips bit-exactly") {
    Rng rng(10);
    const HulmParams theta = testutil::random_params(rng, 3, 4, 2, -2.0, 2.0);
    const std::string path =
        (std::filesystem::temp_directory_path() / "hulm_model_roundtrip.json").string();
    save_hulm(theta, path);
    HulmParams loaded = load_hulm(path);
    std::filesystem::remove(path);

    HulmParams mutable_theta = theta;
    auto a = param_blocks(mutable_theta);
    auto b = param_blocks(loaded);
    for (int blk = 0; blk < 7; ++blk) {
        REQUIRE(a[blk].size == b[blk].size);
        for (Eigen::Index i = 0; i < a[blk].size; ++i) {
            CHECK(a[blk].data[i] == b[blk].data[i]);
        }
    }
}

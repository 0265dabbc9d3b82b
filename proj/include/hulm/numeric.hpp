#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace hulm {

/// log(exp(a) + exp(b)) without leaving the log domain.
inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// log Σ exp(x_i) over a span; -inf on empty input.
inline double log_sum_exp(std::span<const double> xs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - hi);
    return hi + std::log(sum);
}

/// Dense row-major (n1, n2, n3) array of doubles.
class Grid3 {
public:
    Grid3() = default;
    Grid3(std::ptrdiff_t n1, std::ptrdiff_t n2, std::ptrdiff_t n3, double fill = 0.0)
        : n1_(n1), n2_(n2), n3_(n3),
          data_(static_cast<std::size_t>(n1 * n2 * n3), fill) {}

    double& operator()(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) {
        return data_[static_cast<std::size_t>((i * n2_ + j) * n3_ + k)];
    }
    double operator()(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) const {
        return data_[static_cast<std::size_t>((i * n2_ + j) * n3_ + k)];
    }

    std::ptrdiff_t dim1() const { return n1_; }
    std::ptrdiff_t dim2() const { return n2_; }
    std::ptrdiff_t dim3() const { return n3_; }
    std::span<const double> flat() const { return data_; }

private:
    std::ptrdiff_t n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<double> data_;
};

/// Dense row-major (n1, n2, n3, n4) array of doubles.
class Grid4 {
public:
    Grid4() = default;
    Grid4(std::ptrdiff_t n1, std::ptrdiff_t n2, std::ptrdiff_t n3, std::ptrdiff_t n4,
          double fill = 0.0)
        : n1_(n1), n2_(n2), n3_(n3), n4_(n4),
          data_(static_cast<std::size_t>(n1 * n2 * n3 * n4), fill) {}

    double& operator()(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k, std::ptrdiff_t l) {
        return data_[static_cast<std::size_t>(((i * n2_ + j) * n3_ + k) * n4_ + l)];
    }
    double operator()(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k, std::ptrdiff_t l) const {
        return data_[static_cast<std::size_t>(((i * n2_ + j) * n3_ + k) * n4_ + l)];
    }

    std::ptrdiff_t dim1() const { return n1_; }
    std::ptrdiff_t dim2() const { return n2_; }
    std::ptrdiff_t dim3() const { return n3_; }
    std::ptrdiff_t dim4() const { return n4_; }
    std::span<const double> flat() const { return data_; }

private:
    std::ptrdiff_t n1_ = 0, n2_ = 0, n3_ = 0, n4_ = 0;
    std::vector<double> data_;
};

}  // namespace hulm

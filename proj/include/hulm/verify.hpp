#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hulm/learning.hpp"
#include "hulm/oracle.hpp"

namespace hulm {

/// Randomized self-checks pitting the message-passing implementation against
/// the brute-force oracles and finite differences. Exposed in the library so
/// the CLI can run them on demand.
struct VerifyOptions {
    int oracle_trials = 200;
    int gradient_trials = 50;
    int normalization_trials = 1000;
    std::uint64_t seed = 20240915;

    // Instance family; 2^(max_len * max_hidden) must fit the budget.
    int max_hidden = 3;
    int max_len = 4;
    int max_dim = 2;
    int max_classes = 3;
    OracleBudget budget;

    double log_m_rel_tol = 1e-10;
    double marginal_abs_tol = 1e-9;
    double grad_rel_tol = 1e-5;
    double grad_abs_floor = 1e-8;
    double normalization_tol = 1e-12;
    double fd_step = 1e-5;

    // Test hook: applied to each analytic gradient before comparison, so the
    // suite's ability to catch a wrong gradient is itself testable.
    std::function<void(Gradient&)> gradient_tamper;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // largest observed discrepancy
    double tolerance = 0.0;
    std::string detail;
};

/// Runs all checks; never throws on a failed tolerance (only on misuse such
/// as a budget violation). A check failure is reported in its CheckResult.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace hulm

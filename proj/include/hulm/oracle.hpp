#pragma once

#include "hulm/inference.hpp"
#include "hulm/learning.hpp"
#include "hulm/model.hpp"
#include "hulm/types.hpp"

namespace hulm {

// Exhaustive reference implementations. Exponential in T*H by construction;
// the budget refuses instances that would enumerate more than max_states
// configurations. These ship with the library so the CLI can run the same
// checks the test suite does.

struct OracleBudget {
    std::uint64_t max_states = 1ull << 20;
};

/// log sum over every hidden assignment of exp(energy), by direct enumeration
/// with a two-pass max-then-sum reduction. Throws BudgetError when
/// 2^(T*H) > budget.max_states.
double brute_log_m(const TimeSeries& x, const LabelVector& y, const HulmParams& theta,
                   const OracleBudget& budget = {});

/// Posterior node and edge marginals by normalized enumeration.
Marginals brute_marginals(const TimeSeries& x, const LabelVector& y, const HulmParams& theta,
                          const OracleBudget& budget = {});

/// Central finite differences of the single-example unregularized
/// log-likelihood, coordinate by coordinate. The formula is symmetric in the
/// sign of step; step must be finite and nonzero.
Gradient finite_diff_gradient(const TimeSeries& x, const LabelVector& y,
                              const HulmParams& theta, double step = 1e-5);

}  // namespace hulm

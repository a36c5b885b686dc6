#pragma once

#include <dtm/problem.hpp>

namespace dtm {

/// The first step of the method of steps: every reference through a constant or
/// time-dependent delay is replaced by the Taylor series of phi^(d)(alpha(t)).
/// Only proportional delays remain in `equations`.
struct ReducedSystem {
    int n = 1;
    int trunc_order = 10;
    std::vector<std::string> vars;
    std::vector<Expr> equations;
    std::vector<DelaySpec> delays;
    std::vector<std::vector<double>> init; // init[j][k] = u_j^(k)(0)
    ValidityInterval validity;

    int p() const noexcept { return static_cast<int>(vars.size()); }
};

/// Taylor series of alpha(t) = t - tau or t - tau(t) about 0.
Series delay_argument_series(const DelaySpec& delay, std::size_t order);

/// Series of phi^(d)(alpha(t)) with the same order as `alpha`. The expansion of
/// phi is taken about alpha(0) and then composed with alpha - alpha(0).
Series history_series(const Expr& phi, int d, const Series& alpha);

/// History leaves are built to order N + n.
ReducedSystem substitute_history(const CauchyProblem& problem);

} // namespace dtm

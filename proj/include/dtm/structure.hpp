#pragma once

#include <dtm/delay.hpp>
#include <dtm/expr.hpp>

#include <span>
#include <vector>

namespace dtm {

struct RefSite {
    int equation;
    StateRef ref;

    bool operator==(const RefSite&) const = default;
};

/// Derivative-order bookkeeping of a right-hand side system.
struct StructureReport {
    std::vector<int> delay_max_deriv; // m_i, 0 for unused delays
    int m = 0;                        // max m_i
    int omega = 0;                    // sum m_i
    bool neutral = false;             // m == n
    /// Per equation: references u^(n)(q t) with a proportional delay.
    std::vector<std::vector<StateRef>> neutral_proportional;
    /// Every state reference, in traversal order.
    std::vector<RefSite> refs;

    bool operator==(const StructureReport&) const = default;
};

/// Throws ValidationError for references of order above n, undelayed
/// references of order n, and indices outside the declared variables/delays.
StructureReport analyze(std::span<const Expr> equations, int n, int p, std::span<const DelaySpec> delays);

} // namespace dtm

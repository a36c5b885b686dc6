#pragma once

#include <dtm/expr.hpp>

#include <string>

namespace dtm {

enum class DelayKind { constant, proportional, time_dependent };

std::string_view name(DelayKind kind) noexcept;

/// One delayed argument alpha(t): t - tau, q t, or t - tau(t).
struct DelaySpec {
    std::string id;
    DelayKind kind = DelayKind::constant;
    double value = 0.0; // tau (constant) or q (proportional)
    Expr tau;           // time-dependent lag, an expression in t

    static DelaySpec constant(std::string id, double tau);
    static DelaySpec proportional(std::string id, double q);
    static DelaySpec time_dependent(std::string id, Expr tau);

    /// alpha(t) as an expression in t.
    Expr argument() const;
    double argument_at(double t) const;
};

} // namespace dtm

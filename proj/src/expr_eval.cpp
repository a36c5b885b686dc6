#include <dtm/error.hpp>
#include <dtm/expr.hpp>

#include "overloaded.hpp"

#include <cmath>

namespace dtm {
namespace {

using detail::overloaded;

ElementaryFn elementary(FuncTag tag) {
    switch (tag) {
    case FuncTag::exp: return {Elementary::exp};
    case FuncTag::ln: return {Elementary::ln};
    case FuncTag::sin: return {Elementary::sin};
    case FuncTag::cos: return {Elementary::cos};
    }
    throw std::invalid_argument("unknown function tag");
}

[[noreturn]] void rethrow_in(const DomainError& err, const Expr& where) {
    throw DomainError(std::string(err.what()) + " in '" + to_string(where) + "'");
}

double checked(double v, const Expr& where, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " produced a non-finite value in '" + to_string(where) + "'");
    }
    return v;
}

} // namespace

Series evaluate_series(const Expr& e, const Series& time, const SeriesLeafFn& leaf) {
    const std::size_t order = time.order();
    return std::visit(
        overloaded{
            [&](const Const& c) { return Series::constant(c.value, order); },
            [&](const Time&) { return time; },
            [&](const StateRef& r) {
                Series s = leaf(r);
                if (s.order() != order) {
                    throw OrderMismatch("state reference '" + to_string(e) + "' resolved to order " +
                                        std::to_string(s.order()) + ", expected " + std::to_string(order));
                }
                return s;
            },
            [&](const Neg& n) { return negate(evaluate_series(n.arg, time, leaf)); },
            [&](const Binary& b) {
                Series lhs = evaluate_series(b.lhs, time, leaf);
                Series rhs = evaluate_series(b.rhs, time, leaf);
                switch (b.op) {
                case BinaryOp::add: return add(lhs, rhs);
                case BinaryOp::sub: return sub(lhs, rhs);
                case BinaryOp::mul: return mul(lhs, rhs);
                case BinaryOp::div:
                    try {
                        return div(lhs, rhs);
                    } catch (const DomainError& err) {
                        rethrow_in(err, e);
                    }
                }
                throw std::invalid_argument("unknown binary operator");
            },
            [&](const Power& p) {
                Series base = evaluate_series(p.base, time, leaf);
                try {
                    return pow(base, p.exponent);
                } catch (const DomainError& err) {
                    rethrow_in(err, e);
                }
            },
            [&](const Func& f) {
                Series arg = evaluate_series(f.arg, time, leaf);
                try {
                    return compose(elementary(f.tag), arg);
                } catch (const DomainError& err) {
                    rethrow_in(err, e);
                }
            },
            [&](const Known& k) { return k.series.prefix(order); },
        },
        e.node());
}

double evaluate_scalar(const Expr& e, double t, const ScalarLeafFn& leaf) {
    return std::visit(
        overloaded{
            [&](const Const& c) { return c.value; },
            [&](const Time&) { return t; },
            [&](const StateRef& r) { return leaf(r); },
            [&](const Neg& n) { return -evaluate_scalar(n.arg, t, leaf); },
            [&](const Binary& b) {
                const double lhs = evaluate_scalar(b.lhs, t, leaf);
                const double rhs = evaluate_scalar(b.rhs, t, leaf);
                switch (b.op) {
                case BinaryOp::add: return lhs + rhs;
                case BinaryOp::sub: return lhs - rhs;
                case BinaryOp::mul: return lhs * rhs;
                case BinaryOp::div:
                    if (rhs == 0.0) throw DomainError("division by zero in '" + to_string(e) + "'");
                    return lhs / rhs;
                }
                throw std::invalid_argument("unknown binary operator");
            },
            [&](const Power& p) {
                const double base = evaluate_scalar(p.base, t, leaf);
                if (base < 0.0 && std::floor(p.exponent) != p.exponent) {
                    throw DomainError("negative base for non-integer power in '" + to_string(e) + "'");
                }
                return checked(std::pow(base, p.exponent), e, "pow");
            },
            [&](const Func& f) {
                const double x = evaluate_scalar(f.arg, t, leaf);
                switch (f.tag) {
                case FuncTag::exp: return checked(std::exp(x), e, "exp");
                case FuncTag::ln:
                    if (!(x > 0.0)) throw DomainError("ln of non-positive value in '" + to_string(e) + "'");
                    return std::log(x);
                case FuncTag::sin: return std::sin(x);
                case FuncTag::cos: return std::cos(x);
                }
                throw std::invalid_argument("unknown function tag");
            },
            [&](const Known& k) { return evaluate(k.series, t); },
        },
        e.node());
}

namespace {

[[noreturn]] void no_state(const StateRef& r) {
    throw ValidationError("expected an expression in t only, found state reference '" + r.var_name + "'");
}

} // namespace

double evaluate_in_time(const Expr& e, double t) {
    return evaluate_scalar(e, t, [](const StateRef& r) -> double { no_state(r); });
}

Series series_in_time(const Expr& e, const Series& time) {
    return evaluate_series(e, time, [](const StateRef& r) -> Series { no_state(r); });
}

} // namespace dtm

#pragma once

#include <dtm/series.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dtm {

class Expr;

struct Const {
    double value;
};

struct Time {};

/// u_var^(deriv) evaluated at t, or at the delayed argument of `delay`.
/// Indices are 0-based positions in the problem's variable and delay lists;
/// the names are kept for printing and diagnostics only.
struct StateRef {
    int var = 0;
    int deriv = 0;
    std::optional<int> delay;
    std::string var_name;
    std::string delay_name;

    bool operator==(const StateRef& o) const noexcept {
        return var == o.var && deriv == o.deriv && delay == o.delay;
    }
};

enum class BinaryOp { add, sub, mul, div };
enum class FuncTag { exp, ln, sin, cos };

std::string_view name(FuncTag tag) noexcept;

struct Neg;
struct Binary;
struct Power;
struct Func;
struct Known;

using Node = std::variant<Const, Time, StateRef, Neg, Binary, Power, Func, Known>;

/// Immutable expression tree handle. Copies share structure.
class Expr {
public:
    Expr();
    explicit Expr(Node node);

    const Node& node() const noexcept;

    template <class T>
    const T* as() const noexcept;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const Node> node_;
};

struct Neg {
    Expr arg;
};

struct Binary {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};

struct Power {
    Expr base;
    double exponent;
};

struct Func {
    FuncTag tag;
    Expr arg;
};

/// A coefficient-level leaf, produced when history terms are replaced.
struct Known {
    Series series;
};

inline const Node& Expr::node() const noexcept { return *node_; }

template <class T>
const T* Expr::as() const noexcept {
    return std::get_if<T>(node_.get());
}

Expr make_const(double v);
Expr make_time();
Expr make_state(StateRef ref);
Expr make_neg(Expr e);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);
Expr make_pow(Expr base, double exponent);
Expr make_func(FuncTag tag, Expr arg);
Expr make_known(Series s);

inline Expr operator+(Expr a, Expr b) { return make_binary(BinaryOp::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return make_binary(BinaryOp::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return make_binary(BinaryOp::mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return make_binary(BinaryOp::div, std::move(a), std::move(b)); }

/// Re-parseable text. Binary nodes are fully parenthesised; known-series
/// leaves print as `series[...]` and do not re-parse.
std::string to_string(const Expr& e);

void for_each_state_ref(const Expr& e, const std::function<void(const StateRef&)>& fn);
bool contains_state_ref(const Expr& e);
bool contains_time(const Expr& e);

/// Rebuilds the tree, replacing every StateRef for which `fn` yields a value.
Expr rewrite_state_refs(const Expr& e, const std::function<std::optional<Expr>(const StateRef&)>& fn);

// ---------------------------------------------------------------------------
// Parsing

struct ParseContext {
    std::vector<std::string> vars;
    std::vector<std::string> delays;
    int max_deriv = 0;
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'? power
///   power  := atom ('^' (number | '(' '-'? number ('/' number)? ')'))?
///   atom   := number | 't' | funcall | stateref | '(' expr ')'
///   funcall  := ('exp'|'ln'|'sin'|'cos') '(' expr ')'
///   stateref := ident '\''* ('@' ident)?
/// Binary operations on two constants are folded. Throws ParseError.
Expr parse_expression(std::string_view text, const ParseContext& ctx);

// ---------------------------------------------------------------------------
// Evaluation

using SeriesLeafFn = std::function<Series(const StateRef&)>;
using ScalarLeafFn = std::function<double(const StateRef&)>;

/// Evaluates over truncated series arithmetic; `time` stands in for t and fixes
/// the working order. Domain failures rethrow as DomainError naming the
/// offending subexpression.
Series evaluate_series(const Expr& e, const Series& time, const SeriesLeafFn& leaf);

/// Pointwise evaluation; known-series leaves are evaluated as polynomials in t.
double evaluate_scalar(const Expr& e, double t, const ScalarLeafFn& leaf);

/// For expressions in t only; throws ValidationError on any StateRef.
double evaluate_in_time(const Expr& e, double t);
Series series_in_time(const Expr& e, const Series& time);

} // namespace dtm

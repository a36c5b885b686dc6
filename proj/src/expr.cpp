#include <dtm/expr.hpp>

#include "overloaded.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>

namespace dtm {
namespace {

using detail::overloaded;

std::string real_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Expr& e, std::string& out) {
    std::visit(overloaded{
                   [&](const Const& c) {
                       if (c.value < 0.0 || (c.value == 0.0 && std::signbit(c.value))) {
                           out += "(-" + real_text(-c.value) + ")";
                       } else {
                           out += real_text(c.value);
                       }
                   },
                   [&](const Time&) { out += 't'; },
                   [&](const StateRef& r) {
                       out += r.var_name;
                       out.append(static_cast<std::size_t>(r.deriv), '\'');
                       if (r.delay) out += "@" + r.delay_name;
                   },
                   [&](const Neg& n) {
                       out += "(-";
                       print(n.arg, out);
                       out += ')';
                   },
                   [&](const Binary& b) {
                       static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
                       out += '(';
                       print(b.lhs, out);
                       out += ops[static_cast<int>(b.op)];
                       print(b.rhs, out);
                       out += ')';
                   },
                   [&](const Power& p) {
                       out += '(';
                       print(p.base, out);
                       out += ")^";
                       if (p.exponent >= 0.0 && std::floor(p.exponent) == p.exponent && p.exponent < 1e15) {
                           out += real_text(p.exponent);
                       } else {
                           out += "(" + real_text(p.exponent) + ")";
                       }
                   },
                   [&](const Func& f) {
                       out += name(f.tag);
                       out += '(';
                       print(f.arg, out);
                       out += ')';
                   },
                   [&](const Known& k) {
                       out += "series[";
                       for (std::size_t i = 0; i < k.series.size(); ++i) {
                           if (i) out += ", ";
                           out += real_text(k.series[i]);
                       }
                       out += ']';
                   },
               },
               e.node());
}

} // namespace

std::string_view name(FuncTag tag) noexcept {
    switch (tag) {
    case FuncTag::exp: return "exp";
    case FuncTag::ln: return "ln";
    case FuncTag::sin: return "sin";
    case FuncTag::cos: return "cos";
    }
    return "?";
}

Expr::Expr() : node_(std::make_shared<const Node>(Const{0.0})) {}

Expr::Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->index() != b.node_->index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(*b.node_);
            if constexpr (std::is_same_v<T, Const>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Time>) {
                return true;
            } else if constexpr (std::is_same_v<T, StateRef>) {
                return x == y;
            } else if constexpr (std::is_same_v<T, Neg>) {
                return x.arg == y.arg;
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
            } else if constexpr (std::is_same_v<T, Power>) {
                return x.exponent == y.exponent && x.base == y.base;
            } else if constexpr (std::is_same_v<T, Func>) {
                return x.tag == y.tag && x.arg == y.arg;
            } else {
                return x.series == y.series;
            }
        },
        *a.node_);
}

Expr make_const(double v) { return Expr(Const{v}); }
Expr make_time() { return Expr(Time{}); }
Expr make_state(StateRef ref) { return Expr(std::move(ref)); }
Expr make_neg(Expr e) { return Expr(Neg{std::move(e)}); }
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) { return Expr(Binary{op, std::move(lhs), std::move(rhs)}); }
Expr make_pow(Expr base, double exponent) { return Expr(Power{std::move(base), exponent}); }
Expr make_func(FuncTag tag, Expr arg) { return Expr(Func{tag, std::move(arg)}); }
Expr make_known(Series s) { return Expr(Known{std::move(s)}); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

void for_each_state_ref(const Expr& e, const std::function<void(const StateRef&)>& fn) {
    std::visit(overloaded{
                   [&](const StateRef& r) { fn(r); },
                   [&](const Neg& n) { for_each_state_ref(n.arg, fn); },
                   [&](const Binary& b) {
                       for_each_state_ref(b.lhs, fn);
                       for_each_state_ref(b.rhs, fn);
                   },
                   [&](const Power& p) { for_each_state_ref(p.base, fn); },
                   [&](const Func& f) { for_each_state_ref(f.arg, fn); },
                   [](const auto&) {},
               },
               e.node());
}

bool contains_state_ref(const Expr& e) {
    bool found = false;
    for_each_state_ref(e, [&](const StateRef&) { found = true; });
    return found;
}

bool contains_time(const Expr& e) {
    return std::visit(overloaded{
                          [](const Time&) { return true; },
                          [](const Neg& n) { return contains_time(n.arg); },
                          [](const Binary& b) { return contains_time(b.lhs) || contains_time(b.rhs); },
                          [](const Power& p) { return contains_time(p.base); },
                          [](const Func& f) { return contains_time(f.arg); },
                          [](const auto&) { return false; },
                      },
                      e.node());
}

Expr rewrite_state_refs(const Expr& e, const std::function<std::optional<Expr>(const StateRef&)>& fn) {
    return std::visit(overloaded{
                          [&](const StateRef& r) -> Expr {
                              if (auto replacement = fn(r)) return *replacement;
                              return e;
                          },
                          [&](const Neg& n) -> Expr { return make_neg(rewrite_state_refs(n.arg, fn)); },
                          [&](const Binary& b) -> Expr {
                              return make_binary(b.op, rewrite_state_refs(b.lhs, fn), rewrite_state_refs(b.rhs, fn));
                          },
                          [&](const Power& p) -> Expr { return make_pow(rewrite_state_refs(p.base, fn), p.exponent); },
                          [&](const Func& f) -> Expr { return make_func(f.tag, rewrite_state_refs(f.arg, fn)); },
                          [&](const auto&) -> Expr { return e; },
                      },
                      e.node());
}

} // namespace dtm

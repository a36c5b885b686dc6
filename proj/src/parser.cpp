#include <dtm/error.hpp>
#include <dtm/expr.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace dtm {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::optional<FuncTag> func_tag(std::string_view id) {
    if (id == "exp") return FuncTag::exp;
    if (id == "ln") return FuncTag::ln;
    if (id == "sin") return FuncTag::sin;
    if (id == "cos") return FuncTag::cos;
    return std::nullopt;
}

class Parser {
public:
    Parser(std::string_view src, const ParseContext& ctx) : src_(src), ctx_(ctx) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }

    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(message, line, col);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'" +
                 (pos_ < src_.size() ? std::string(", found '") + src_[pos_] + "'" : std::string(" at end of input")));
        }
    }

    Expr fold(BinaryOp op, Expr lhs, Expr rhs, std::size_t at) {
        const Const* a = lhs.as<Const>();
        const Const* b = rhs.as<Const>();
        if (a && b) {
            switch (op) {
            case BinaryOp::add: return make_const(a->value + b->value);
            case BinaryOp::sub: return make_const(a->value - b->value);
            case BinaryOp::mul: return make_const(a->value * b->value);
            case BinaryOp::div:
                if (b->value == 0.0) fail_at("division by zero constant", at);
                return make_const(a->value / b->value);
            }
        }
        return make_binary(op, std::move(lhs), std::move(rhs));
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = fold(BinaryOp::add, std::move(lhs), parse_term(), at);
            } else if (accept('-')) {
                lhs = fold(BinaryOp::sub, std::move(lhs), parse_term(), at);
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = fold(BinaryOp::mul, std::move(lhs), parse_factor(), at);
            } else if (accept('/')) {
                lhs = fold(BinaryOp::div, std::move(lhs), parse_factor(), at);
            } else {
                return lhs;
            }
        }
    }

    Expr parse_factor() {
        if (accept('-')) {
            Expr e = parse_power();
            if (const Const* c = e.as<Const>()) return make_const(-c->value);
            return make_neg(std::move(e));
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (!accept('^')) return base;
        const double exponent = parse_exponent();
        if (const Const* c = base.as<Const>()) {
            const double v = std::pow(c->value, exponent);
            if (std::isfinite(v)) return make_const(v);
        }
        return make_pow(std::move(base), exponent);
    }

    double parse_exponent() {
        skip_ws();
        if (accept('(')) {
            const bool negative = accept('-');
            skip_ws();
            double value = parse_number();
            if (accept('/')) {
                skip_ws();
                const std::size_t at = pos_;
                const double den = parse_number();
                if (den == 0.0) fail_at("zero denominator in exponent", at);
                value /= den;
            }
            expect(')');
            return negative ? -value : value;
        }
        return parse_number();
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) {
            pos_ = start;
            fail("expected a number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && is_digit(src_[p])) {
                while (p < src_.size() && is_digit(src_[p])) ++p;
                pos_ = p;
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || !std::isfinite(value)) {
            fail_at("malformed number", start);
        }
        return value;
    }

    std::string parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (is_digit(c) || c == '.') return make_const(parse_number());
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (!is_ident_start(c)) fail("unexpected character '" + std::string(1, c) + "'");

        const std::size_t start = pos_;
        const std::string id = parse_ident();
        if (id == "t") return make_time();
        if (auto tag = func_tag(id)) {
            expect('(');
            Expr arg = parse_expr();
            expect(')');
            return make_func(*tag, std::move(arg));
        }
        const auto var_it = std::find(ctx_.vars.begin(), ctx_.vars.end(), id);
        if (var_it == ctx_.vars.end()) fail_at("unknown identifier '" + id + "'", start);

        StateRef ref;
        ref.var = static_cast<int>(var_it - ctx_.vars.begin());
        ref.var_name = id;
        while (pos_ < src_.size() && src_[pos_] == '\'') {
            ++pos_;
            ++ref.deriv;
        }
        if (ref.deriv > ctx_.max_deriv) {
            fail_at("derivative order " + std::to_string(ref.deriv) + " of '" + id + "' exceeds equation order " +
                        std::to_string(ctx_.max_deriv),
                    start);
        }
        if (pos_ < src_.size() && src_[pos_] == '@') {
            ++pos_;
            const std::size_t dstart = pos_;
            if (pos_ >= src_.size() || !is_ident_start(src_[pos_])) fail("expected delay name after '@'");
            const std::string delay = parse_ident();
            const auto d_it = std::find(ctx_.delays.begin(), ctx_.delays.end(), delay);
            if (d_it == ctx_.delays.end()) fail_at("unknown delay '" + delay + "'", dstart);
            ref.delay = static_cast<int>(d_it - ctx_.delays.begin());
            ref.delay_name = delay;
        }
        return make_state(std::move(ref));
    }

    std::string_view src_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text, const ParseContext& ctx) { return Parser(text, ctx).parse(); }

} // namespace dtm

#include <dtm/problem_file.hpp>

#include <dtm/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace dtm {
namespace {

struct Line {
    std::size_t number;
    std::string text; // comment stripped, right-trimmed
};

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineCursor {
public:
    explicit LineCursor(const Line& line) : line_(line) {}

    [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
        throw ParseError(message, line_.number, at + 1);
    }

    void skip_ws() {
        while (pos_ < line_.text.size() && std::isspace(static_cast<unsigned char>(line_.text[pos_]))) ++pos_;
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < line_.text.size() && is_ident_char(line_.text[pos_])) ++pos_;
        if (pos_ == start) fail("expected an identifier");
        return line_.text.substr(start, pos_ - start);
    }

    int primes() {
        int count = 0;
        while (pos_ < line_.text.size() && line_.text[pos_] == '\'') {
            ++pos_;
            ++count;
        }
        return count;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= line_.text.size() || line_.text[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }
    std::string rest() const { return line_.text.substr(pos_); }
    std::size_t line() const noexcept { return line_.number; }

    /// Parses the remainder of the line as an expression, mapping error
    /// positions back into the file.
    Expr expression(const ParseContext& ctx) const { return expression_of(rest(), pos_, ctx); }

    Expr expression_of(const std::string& text, std::size_t offset, const ParseContext& ctx) const {
        try {
            return parse_expression(text, ctx);
        } catch (const ParseError& err) {
            throw ParseError(err.bare_message(), line_.number, offset + err.column());
        }
    }

    double constant(const std::string& text, std::size_t offset) const {
        const Expr e = expression_of(text, offset, ParseContext{});
        if (const Const* c = e.as<Const>()) return c->value;
        fail_at("expected a constant", offset);
    }

private:
    const Line& line_;
    std::size_t pos_ = 0;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++number;
        std::string line(text.substr(start, end - start));
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        bool blank = std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
        if (!blank) out.push_back({number, std::move(line)});
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

int parse_int(LineCursor& cur) {
    cur.skip_ws();
    const std::string text = cur.rest();
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) cur.fail("expected an integer");
    return value;
}

std::string where(const Line& l) { return " (line " + std::to_string(l.number) + ")"; }

} // namespace

CauchyProblem parse_problem(std::string_view text) {
    const std::vector<Line> lines = split_lines(text);

    std::optional<int> order;
    std::optional<int> taylor_order;
    std::optional<double> horizon;
    std::optional<std::vector<std::string>> vars;
    struct Pending {
        const Line* line;
        std::string name;
        int primes;
        std::size_t body;
    };
    std::vector<Pending> delays, eqs, inits, phis;

    // Pass 1: scalar settings, variable and delay names.
    for (const Line& l : lines) {
        LineCursor cur(l);
        const std::string key = cur.ident();
        if (key == "order" || key == "taylor_order" || key == "horizon" || key == "vars") {
            cur.expect('=');
            if (key == "order") {
                if (order) throw ValidationError("duplicate 'order'" + where(l));
                order = parse_int(cur);
            } else if (key == "taylor_order") {
                if (taylor_order) throw ValidationError("duplicate 'taylor_order'" + where(l));
                taylor_order = parse_int(cur);
            } else if (key == "horizon") {
                if (horizon) throw ValidationError("duplicate 'horizon'" + where(l));
                cur.skip_ws();
                horizon = cur.constant(cur.rest(), cur.pos());
            } else {
                if (vars) throw ValidationError("duplicate 'vars'" + where(l));
                vars.emplace();
                do {
                    std::string v = cur.ident();
                    if (v == "t" || v == "exp" || v == "ln" || v == "sin" || v == "cos") {
                        cur.fail_at("reserved name '" + v + "' cannot be a variable", cur.pos() - v.size());
                    }
                    if (std::find(vars->begin(), vars->end(), v) != vars->end()) {
                        throw ValidationError("duplicate variable '" + v + "'" + where(l));
                    }
                    vars->push_back(std::move(v));
                    cur.skip_ws();
                    if (cur.pos() >= l.text.size()) break;
                    cur.expect(',');
                } while (true);
            }
            continue;
        }
        if (key == "delay" || key == "eq" || key == "init" || key == "phi") {
            std::string name = cur.ident();
            const int primes = cur.primes();
            if (primes != 0 && key != "eq") cur.fail("unexpected derivative marks");
            cur.expect('=');
            cur.skip_ws();
            Pending pending{&l, std::move(name), primes, cur.pos()};
            (key == "delay" ? delays : key == "eq" ? eqs : key == "init" ? inits : phis).push_back(pending);
            continue;
        }
        cur.fail_at("unknown declaration '" + key + "'", 0);
    }

    if (!order) throw ValidationError("missing 'order'");
    if (!vars) throw ValidationError("missing 'vars'");
    CauchyProblem problem;
    problem.n = *order;
    problem.vars = *vars;
    const std::size_t p = problem.vars.size();

    auto var_index = [&](const Pending& d) -> std::size_t {
        const auto it = std::find(problem.vars.begin(), problem.vars.end(), d.name);
        if (it == problem.vars.end()) {
            LineCursor(*d.line).fail_at("unknown variable '" + d.name + "'", d.line->text.find(d.name));
        }
        return static_cast<std::size_t>(it - problem.vars.begin());
    };

    // Pass 2: delays.
    for (const Pending& d : delays) {
        LineCursor cur(*d.line);
        if (std::any_of(problem.delays.begin(), problem.delays.end(), [&](const DelaySpec& x) { return x.id == d.name; })) {
            throw ValidationError("duplicate delay '" + d.name + "'" + where(*d.line));
        }
        const std::string body = d.line->text.substr(d.body);
        const auto open = body.find('(');
        if (open == std::string::npos || body.back() != ')') {
            cur.fail_at("expected constant(...), proportional(...) or vary(...)", d.body);
        }
        std::string kind = body.substr(0, open);
        while (!kind.empty() && std::isspace(static_cast<unsigned char>(kind.back()))) kind.pop_back();
        const std::string arg = body.substr(open + 1, body.size() - open - 2);
        const std::size_t arg_at = d.body + open + 1;
        if (kind == "constant") {
            problem.delays.push_back(DelaySpec::constant(d.name, cur.constant(arg, arg_at)));
        } else if (kind == "proportional") {
            problem.delays.push_back(DelaySpec::proportional(d.name, cur.constant(arg, arg_at)));
        } else if (kind == "vary") {
            problem.delays.push_back(DelaySpec::time_dependent(d.name, cur.expression_of(arg, arg_at, ParseContext{})));
        } else {
            cur.fail_at("unknown delay kind '" + kind + "'", d.body);
        }
    }

    const ParseContext ctx = problem.parse_context();

    // Pass 3: equations, initial values, initial functions.
    std::vector<std::optional<Expr>> equations(p);
    for (const Pending& e : eqs) {
        const std::size_t j = var_index(e);
        if (e.primes != problem.n) {
            LineCursor(*e.line).fail_at("left-hand side must be the " + std::to_string(problem.n) +
                                            "-th derivative of '" + e.name + "'",
                                        e.line->text.find(e.name));
        }
        if (equations[j]) throw ValidationError("duplicate equation for '" + e.name + "'" + where(*e.line));
        equations[j] = LineCursor(*e.line).expression_of(e.line->text.substr(e.body), e.body, ctx);
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (!equations[j]) throw ValidationError("missing equation for '" + problem.vars[j] + "'");
        problem.equations.push_back(*equations[j]);
    }

    std::vector<std::optional<std::vector<double>>> init(p);
    for (const Pending& e : inits) {
        const std::size_t j = var_index(e);
        if (init[j]) throw ValidationError("duplicate init for '" + e.name + "'" + where(*e.line));
        LineCursor cur(*e.line);
        const std::string& text = e.line->text;
        if (text[e.body] != '[' || text.back() != ']') cur.fail_at("expected a list '[v0, v1, ...]'", e.body);
        std::vector<double> values;
        std::size_t start = e.body + 1;
        const std::size_t close = text.size() - 1;
        while (start < close) {
            std::size_t comma = text.find(',', start);
            if (comma == std::string::npos || comma > close) comma = close;
            values.push_back(cur.constant(text.substr(start, comma - start), start));
            start = comma + 1;
        }
        init[j] = std::move(values);
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (!init[j]) throw ValidationError("missing init for '" + problem.vars[j] + "'");
        problem.init.push_back(*init[j]);
    }

    problem.phi.assign(p, std::nullopt);
    for (const Pending& e : phis) {
        const std::size_t j = var_index(e);
        if (problem.phi[j]) throw ValidationError("duplicate phi for '" + e.name + "'" + where(*e.line));
        problem.phi[j] = LineCursor(*e.line).expression_of(e.line->text.substr(e.body), e.body, ParseContext{});
    }
    if (!horizon) throw ValidationError("missing 'horizon'");
    if (!taylor_order) throw ValidationError("missing 'taylor_order'");
    problem.horizon = *horizon;
    problem.trunc_order = *taylor_order;
    return problem;
}

CauchyProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

} // namespace dtm

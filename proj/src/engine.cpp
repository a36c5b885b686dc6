#include <dtm/engine.hpp>

#include "overloaded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dtm {
namespace {

using detail::overloaded;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool is_neutral_ref(const StateRef& r, int n, std::span<const DelaySpec> delays) {
    return r.delay && r.deriv == n && delays[static_cast<std::size_t>(*r.delay)].kind == DelayKind::proportional;
}

bool has_neutral(const Expr& e, int n, std::span<const DelaySpec> delays) {
    bool found = false;
    for_each_state_ref(e, [&](const StateRef& r) { found = found || is_neutral_ref(r, n, delays); });
    return found;
}

// k! / (k+n)!
double falling_ratio(int k, int n) {
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) prod *= static_cast<double>(k + i);
    return 1.0 / prod;
}

Series state_leaf(const ReducedSystem& sys, const CoefficientTable& table, int k, const StateRef& r,
                  double unknown) {
    const auto d = static_cast<std::size_t>(r.deriv);
    const std::size_t last = static_cast<std::size_t>(k) + d;
    const auto& column = table.at(static_cast<std::size_t>(r.var));
    std::vector<double> c(last + 1);
    for (std::size_t i = 0; i <= last; ++i) {
        if (i < column.size()) {
            c[i] = column[i];
        } else if (i == column.size() && r.deriv == sys.n) {
            c[i] = unknown; // U_j(k+n) of a neutral reference
        } else {
            throw std::logic_error("recurrence read U_" + r.var_name + "(" + std::to_string(i) +
                                   ") before it was computed");
        }
    }
    Series s = differentiate(Series(std::move(c)), d);
    if (r.delay) {
        const DelaySpec& delay = sys.delays.at(static_cast<std::size_t>(*r.delay));
        if (delay.kind != DelayKind::proportional) {
            throw std::logic_error("unreduced history reference '" + r.var_name + "@" + delay.id + "'");
        }
        s = scale_arg(s, delay.value);
    }
    return s;
}

double rhs_at(const ReducedSystem& sys, int j, int k, const CoefficientTable& table, double unknown) {
    const Series time = Series::monomial(1, static_cast<std::size_t>(k));
    const Series f = evaluate_series(sys.equations.at(static_cast<std::size_t>(j)), time,
                                     [&](const StateRef& r) { return state_leaf(sys, table, k, r, unknown); });
    return f[static_cast<std::size_t>(k)];
}

TaylorSolution make_partial(const ReducedSystem& sys, const CoefficientTable& table) {
    TaylorSolution s;
    s.n = sys.n;
    s.vars = sys.vars;
    s.validity = sys.validity;
    std::size_t len = table.empty() ? 0 : table.front().size();
    for (const auto& col : table) len = std::min(len, col.size());
    s.order = static_cast<int>(len) - 1;
    for (const auto& col : table) {
        s.coefficients.emplace_back(std::vector<double>(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(len)));
    }
    return s;
}

} // namespace

std::string_view name(SolveErrorKind kind) noexcept {
    switch (kind) {
    case SolveErrorKind::zero_pivot_inconsistent: return "ZeroPivotInconsistent";
    case SolveErrorKind::zero_pivot_underdetermined: return "ZeroPivotUnderdetermined";
    case SolveErrorKind::nonlinear_neutral: return "NonlinearNeutral";
    case SolveErrorKind::domain: return "DomainError";
    }
    return "?";
}

SolveError::SolveError(SolveErrorKind kind, std::string message, int equation, int k, double pivot, double residual,
                       TaylorSolution partial)
    : Error(std::move(message)), kind_(kind), equation_(equation), k_(k), pivot_(pivot), residual_(residual),
      partial_(std::move(partial)) {}

CoefficientTable transform_initial_conditions(const CauchyProblem& problem) {
    CoefficientTable table(problem.init.size());
    for (std::size_t j = 0; j < problem.init.size(); ++j) {
        double factorial = 1.0;
        for (std::size_t k = 0; k < problem.init[j].size(); ++k) {
            if (k > 0) factorial *= static_cast<double>(k);
            table[j].push_back(problem.init[j][k] / factorial);
        }
    }
    return table;
}

std::optional<std::string> find_nonlinear_neutral(const Expr& equation, int n, std::span<const DelaySpec> delays) {
    if (!has_neutral(equation, n, delays)) return std::nullopt;
    return std::visit(
        overloaded{
            [&](const StateRef&) -> std::optional<std::string> { return std::nullopt; },
            [&](const Neg& g) { return find_nonlinear_neutral(g.arg, n, delays); },
            [&](const Binary& b) -> std::optional<std::string> {
                const bool left = has_neutral(b.lhs, n, delays);
                const bool right = has_neutral(b.rhs, n, delays);
                switch (b.op) {
                case BinaryOp::add:
                case BinaryOp::sub:
                    if (auto bad = find_nonlinear_neutral(b.lhs, n, delays)) return bad;
                    return find_nonlinear_neutral(b.rhs, n, delays);
                case BinaryOp::mul: {
                    if (left && right) return to_string(equation);
                    const Expr& coefficient = left ? b.rhs : b.lhs;
                    if (contains_state_ref(coefficient)) return to_string(equation);
                    return find_nonlinear_neutral(left ? b.lhs : b.rhs, n, delays);
                }
                case BinaryOp::div:
                    if (right || contains_state_ref(b.rhs)) return to_string(equation);
                    return find_nonlinear_neutral(b.lhs, n, delays);
                }
                return to_string(equation);
            },
            [&](const auto&) -> std::optional<std::string> { return to_string(equation); },
        },
        equation.node());
}

RhsCoefficient rhs_coefficient(const ReducedSystem& system, int j, int k, const CoefficientTable& table) {
    const Expr& eq = system.equations.at(static_cast<std::size_t>(j));
    RhsCoefficient out;
    out.value = rhs_at(system, j, k, table, 0.0);
    if (has_neutral(eq, system.n, system.delays)) {
        out.slope = rhs_at(system, j, k, table, 1.0) - out.value;
    }
    return out;
}

std::vector<double> step(const ReducedSystem& system, int k, CoefficientTable& table,
                         std::vector<PivotEntry>* pivot_log) {
    const int p = system.p();
    const double ratio = falling_ratio(k, system.n);
    std::vector<double> next(static_cast<std::size_t>(p));
    std::vector<PivotEntry> pivots;
    for (int j = 0; j < p; ++j) {
        const std::string& var = system.vars[static_cast<std::size_t>(j)];
        RhsCoefficient f;
        try {
            f = rhs_coefficient(system, j, k, table);
        } catch (const DomainError& err) {
            throw SolveError(SolveErrorKind::domain,
                             "equation " + var + " at k=" + std::to_string(k) + ": " + err.what(), j, k, 0.0, 0.0, {});
        } catch (const OrderMismatch& err) {
            throw SolveError(SolveErrorKind::domain,
                             "equation " + var + " at k=" + std::to_string(k) + ": " + err.what(), j, k, 0.0, 0.0, {});
        }
        if (!has_neutral(system.equations[static_cast<std::size_t>(j)], system.n, system.delays)) {
            next[static_cast<std::size_t>(j)] = f.value * ratio;
            continue;
        }
        const double pivot = 1.0 - f.slope * ratio;
        pivots.push_back({j, k, pivot});
        if (std::abs(pivot) < pivot_tolerance) {
            const bool inconsistent = std::abs(f.value) > pivot_residual_tolerance;
            const auto kind =
                inconsistent ? SolveErrorKind::zero_pivot_inconsistent : SolveErrorKind::zero_pivot_underdetermined;
            std::string msg = std::string(name(kind)) + ": equation " + var + " at k=" + std::to_string(k) +
                              ", pivot " + fmt(pivot) + ", residual " + fmt(f.value);
            msg += inconsistent ? " (no analytic solution is consistent with the data at this order)"
                                : " (coefficient not determined by the recurrence)";
            throw SolveError(kind, msg, j, k, pivot, f.value, {});
        }
        next[static_cast<std::size_t>(j)] = f.value * ratio / pivot;
    }
    for (int j = 0; j < p; ++j) table[static_cast<std::size_t>(j)].push_back(next[static_cast<std::size_t>(j)]);
    if (pivot_log) pivot_log->insert(pivot_log->end(), pivots.begin(), pivots.end());
    return next;
}

TaylorSolution solve_reduced(const ReducedSystem& system, const CoefficientTable& initial) {
    CoefficientTable table = initial;
    for (int j = 0; j < system.p(); ++j) {
        if (auto bad = find_nonlinear_neutral(system.equations[static_cast<std::size_t>(j)], system.n,
                                              system.delays)) {
            throw SolveError(SolveErrorKind::nonlinear_neutral,
                             "NonlinearNeutral: equation " + system.vars[static_cast<std::size_t>(j)] +
                                 ": neutral proportional term must enter linearly with a state-free coefficient in '" +
                                 *bad + "'",
                             j, 0, 0.0, 0.0, make_partial(system, table));
        }
    }

    std::vector<PivotEntry> pivot_log;
    const int last_k = system.trunc_order + 1 - system.n;
    for (int k = 0; k <= last_k; ++k) {
        try {
            step(system, k, table, &pivot_log);
        } catch (const SolveError& err) {
            TaylorSolution partial = make_partial(system, table);
            partial.pivot_log = pivot_log;
            throw SolveError(err.kind(), err.what(), err.equation(), err.k(), err.pivot(), err.residual(),
                             std::move(partial));
        }
    }

    TaylorSolution sol;
    sol.n = system.n;
    sol.order = system.trunc_order;
    sol.vars = system.vars;
    sol.validity = system.validity;
    sol.pivot_log = std::move(pivot_log);
    const auto len = static_cast<std::ptrdiff_t>(system.trunc_order + 1);
    for (const auto& col : table) {
        sol.coefficients.emplace_back(std::vector<double>(col.begin(), col.begin() + len));
        sol.next.push_back(col[static_cast<std::size_t>(len)]);
    }
    return sol;
}

TaylorSolution solve(const CauchyProblem& problem) {
    validate(problem);
    const StructureReport structure = analyze(problem.equations, problem.n, problem.p(), problem.delays);
    const H2Report h2 = check_h2(problem, structure);
    if (!h2.pass) {
        const H2Violation& v = h2.violations.front();
        throw ValidationError("hypothesis H2 violated: equation " + problem.vars[static_cast<std::size_t>(v.equation)] +
                              " contains the n-th derivative of " + problem.vars[static_cast<std::size_t>(v.var)] +
                              " at proportional delay '" + v.delay + "'");
    }
    const ReducedSystem reduced = substitute_history(problem);
    TaylorSolution sol = solve_reduced(reduced, transform_initial_conditions(problem));
    sol.error_estimate = estimate_error(sol, sol.validity.upper);
    return sol;
}

std::vector<ErrorEstimate> estimate_error(const TaylorSolution& solution, double delta) {
    if (!(delta > 0.0) || delta > solution.validity.upper) {
        throw ValidationError("error estimate interval " + fmt(delta) + " outside (0, " +
                              fmt(solution.validity.upper) + "]");
    }
    const int N = solution.order;
    double factorial = 1.0; // (N+1)!
    for (int i = 2; i <= N + 1; ++i) factorial *= i;

    std::vector<ErrorEstimate> out;
    for (std::size_t j = 0; j < solution.coefficients.size(); ++j) {
        ErrorEstimate e;
        e.N = N;
        e.delta = delta;
        const double a = std::abs(solution.next.at(j));
        const double b = std::abs(solution.coefficients[j][static_cast<std::size_t>(N)]);
        if (a == 0.0) {
            e.K_hat = 0.0;
            e.bound = 0.0;
        } else if (b == 0.0) {
            e.convergent = false;
            e.K_hat = std::numeric_limits<double>::infinity();
            e.bound = std::numeric_limits<double>::infinity();
        } else {
            // First omitted term, inflated by the geometric tail suggested by
            // the last coefficient ratio.
            const double rho = a / b;
            const double growth = std::max(1.0, rho * rho);
            const double r = rho * delta;
            if (r >= 1.0) {
                e.convergent = false;
                e.K_hat = std::numeric_limits<double>::infinity();
                e.bound = std::numeric_limits<double>::infinity();
            } else {
                e.K_hat = factorial * a * growth / (1.0 - r);
                e.bound = a * growth / (1.0 - r) * std::pow(delta, N + 1);
            }
        }
        out.push_back(e);
    }
    return out;
}

std::vector<double> evaluate_solution(const TaylorSolution& solution, double t, bool strict) {
    if (strict && (t < 0.0 || t > solution.validity.upper)) {
        throw ValidationError("t = " + fmt(t) + " is outside the validity interval [0, " +
                              fmt(solution.validity.upper) + "]");
    }
    std::vector<double> out;
    out.reserve(solution.coefficients.size());
    for (const auto& c : solution.coefficients) out.push_back(evaluate(c, t));
    return out;
}

std::vector<Series> residual(const ReducedSystem& system, const TaylorSolution& solution) {
    const int n = system.n;
    const int R = solution.order - n;
    if (R < 0) throw ValidationError("residual needs N >= n");
    const auto order = static_cast<std::size_t>(R);
    const Series time = Series::monomial(1, order);

    std::vector<Series> out;
    for (int j = 0; j < system.p(); ++j) {
        auto leaf = [&](const StateRef& r) {
            const Series& u = solution.coefficients.at(static_cast<std::size_t>(r.var));
            Series s = differentiate(u.prefix(order + static_cast<std::size_t>(r.deriv)),
                                     static_cast<std::size_t>(r.deriv));
            if (r.delay) s = scale_arg(s, system.delays.at(static_cast<std::size_t>(*r.delay)).value);
            return s;
        };
        const Series f = evaluate_series(system.equations[static_cast<std::size_t>(j)], time, leaf);
        const Series lhs = differentiate(solution.coefficients[static_cast<std::size_t>(j)], static_cast<std::size_t>(n));
        out.push_back(sub(lhs, f));
    }
    return out;
}

} // namespace dtm

#pragma once

#include <dtm/error.hpp>
#include <dtm/problem.hpp>
#include <dtm/reduce.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dtm {

/// table[j][k] = U_j(k), filled left to right by the recurrence.
using CoefficientTable = std::vector<std::vector<double>>;

struct PivotEntry {
    int equation;
    int k;
    double pivot; // 1 - sum_s C_s(0) q_s^k
};

/// Heuristic truncation-error estimate on [0, delta] for one variable.
struct ErrorEstimate {
    int N = 0;
    double delta = 0.0;
    double K_hat = 0.0;
    double bound = 0.0; // K_hat delta^{N+1} / (N+1)!; +inf when the tail does not look convergent
    bool convergent = true;
};

struct TaylorSolution {
    int n = 1;
    int order = 0; // N
    std::vector<std::string> vars;
    std::vector<Series> coefficients; // per variable, order N
    std::vector<double> next;         // U_j(N+1), kept for the error estimate
    ValidityInterval validity;
    std::vector<PivotEntry> pivot_log;
    std::vector<ErrorEstimate> error_estimate; // delta = validity.upper
};

enum class SolveErrorKind { zero_pivot_inconsistent, zero_pivot_underdetermined, nonlinear_neutral, domain };

std::string_view name(SolveErrorKind kind) noexcept;

/// Failure of the recurrence. `partial` holds every coefficient fixed before
/// the failing step.
class SolveError : public Error {
public:
    SolveError(SolveErrorKind kind, std::string message, int equation, int k, double pivot, double residual,
               TaylorSolution partial);

    SolveErrorKind kind() const noexcept { return kind_; }
    int equation() const noexcept { return equation_; }
    int k() const noexcept { return k_; }
    double pivot() const noexcept { return pivot_; }
    double residual() const noexcept { return residual_; }
    const TaylorSolution& partial() const noexcept { return partial_; }

private:
    SolveErrorKind kind_;
    int equation_;
    int k_;
    double pivot_;
    double residual_;
    TaylorSolution partial_;
};

constexpr double pivot_tolerance = 1e-12;
constexpr double pivot_residual_tolerance = 1e-9;

/// U_j(k) = v_{k,j} / k! for k < n.
CoefficientTable transform_initial_conditions(const CauchyProblem& problem);

/// F_j(k): coefficient of t^k in f_j. For an equation with neutral proportional
/// terms, `value` has the unknown U_j(k+n) set to zero and `slope` is the
/// derivative of F_j(k) with respect to it; otherwise slope is 0.
struct RhsCoefficient {
    double value = 0.0;
    double slope = 0.0;
};

RhsCoefficient rhs_coefficient(const ReducedSystem& system, int j, int k, const CoefficientTable& table);

/// Computes U_•(k+n), appends it to the table and logs pivots. Throws
/// SolveError on a vanishing pivot or a domain failure.
std::vector<double> step(const ReducedSystem& system, int k, CoefficientTable& table,
                         std::vector<PivotEntry>* pivot_log = nullptr);

/// Full pipeline: validation, H2, reduction, recurrence for k = 0..N+1-n.
TaylorSolution solve(const CauchyProblem& problem);

/// Recurrence only, for an already reduced system.
TaylorSolution solve_reduced(const ReducedSystem& system, const CoefficientTable& initial);

/// Per-variable estimates. Requires 0 < delta <= validity.upper.
std::vector<ErrorEstimate> estimate_error(const TaylorSolution& solution, double delta);

/// Throws ValidationError in strict mode when t is outside [0, validity.upper].
std::vector<double> evaluate_solution(const TaylorSolution& solution, double t, bool strict = true);

/// Coefficients of u_j^(n) - f_j after substituting the truncated polynomials,
/// computed at order N - n in one pass.
std::vector<Series> residual(const ReducedSystem& system, const TaylorSolution& solution);

/// Subexpression text of the first neutral proportional reference that is not
/// linear with a state-free coefficient, if any.
std::optional<std::string> find_nonlinear_neutral(const Expr& equation, int n, std::span<const DelaySpec> delays);

} // namespace dtm

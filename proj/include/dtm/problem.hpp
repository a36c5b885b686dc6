#pragma once

#include <dtm/delay.hpp>
#include <dtm/expr.hpp>
#include <dtm/structure.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dtm {

/// u^(n)(t) = f(t, u, ..., u^(n-1), u(alpha_1(t)), ...) with u^(k)(0) = v_k and
/// an initial function phi on [t*, 0].
struct CauchyProblem {
    int n = 1;
    std::vector<std::string> vars;
    std::vector<Expr> equations;            // right-hand sides, one per variable
    std::vector<DelaySpec> delays;
    std::vector<std::optional<Expr>> phi;   // initial functions, expressions in t
    std::vector<std::vector<double>> init;  // init[j][k] = u_j^(k)(0), k < n
    double horizon = 1.0;                   // T*
    int trunc_order = 10;                   // N

    int p() const noexcept { return static_cast<int>(vars.size()); }
    bool has_history_delays() const noexcept;
    ParseContext parse_context() const;
};

struct DelayCrossing {
    std::string id;
    double t_alpha = 0.0;  // inf{t : alpha(t) > 0}; 0 means excluded from the minimum
    bool excluded = false;
    std::string note;
};

struct ValidityInterval {
    double t_star = 0.0;
    double t_alpha = std::numeric_limits<double>::infinity();
    double upper = 0.0; // min(t_alpha, T*)
    std::vector<DelayCrossing> per_delay;
};

/// Shape, parameter and sampling checks. Throws ValidationError.
void validate(const CauchyProblem& problem);

/// Throws ValidationError when a crossing search fails to converge.
ValidityInterval compute_validity(const CauchyProblem& problem);

/// Root of alpha(t) = 0 for a time-dependent delay: scan [0, horizon] in
/// `steps` intervals for the first sign change, then bisect.
std::optional<double> first_crossing(const DelaySpec& delay, double horizon, int steps = 1000, int iterations = 80);

struct CompatibilityEntry {
    int var;
    int k;
    double init;      // u^(k)(0)
    double phi;       // phi^(k)(0)
    double residual;  // init - phi
    bool pass;
};

struct CompatibilityReport {
    std::vector<CompatibilityEntry> entries;
    bool pass = true;
};

constexpr double compatibility_tolerance = 1e-9;

CompatibilityReport check_compatibility(const CauchyProblem& problem);

struct H2Violation {
    int equation;
    int var;
    std::string delay;
};

struct H2Report {
    std::vector<H2Violation> violations;
    bool pass = true;
};

H2Report check_h2(const CauchyProblem& problem, const StructureReport& structure);

} // namespace dtm

#pragma once

#include <dtm/engine.hpp>
#include <dtm/problem.hpp>
#include <dtm/structure.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dtm {

/// Real number with 17 significant digits; inf/nan spelled out.
std::string format_real(double x);

/// Header `var,k0,k1,...`, one row per variable, then `#` lines with the
/// validity interval, error estimates and pivots.
std::string to_csv(const TaylorSolution& solution);

/// {"variables":[{"name","coefficients"}], "validity":{...},
///  "error_estimate":[{"name","N","delta","bound"}], "pivot_log":[...]}.
/// Infinite values are written as null.
std::string to_json(const TaylorSolution& solution);

/// Same documents for a failed solve: the partial table plus an "error" object.
std::string to_csv(const SolveError& error);
std::string to_json(const SolveError& error);

struct InfoReport {
    int n = 0;
    int p = 0;
    int r = 0;
    std::vector<std::string> delay_ids;
    StructureReport structure;
    ValidityInterval validity;
    H2Report h2;
    CompatibilityReport compatibility;

    bool pass() const noexcept { return h2.pass && compatibility.pass; }
};

/// Runs validate() first (throws ValidationError).
InfoReport build_info(const CauchyProblem& problem);

std::string to_text(const InfoReport& info, const CauchyProblem& problem);

struct CompareOptions {
    double h = 1e-3;
    int samples = 101;
    std::optional<double> a;
    std::optional<double> b; // default: validity upper bound
};

struct CompareRow {
    std::string var;
    double measured = 0.0;     // max |taylor - oracle|
    double bound = 0.0;        // truncation bound on [0, b]; inf when not computed
    double oracle_error = 0.0; // |oracle(h) - oracle(2h)| / 15
    bool pass = true;
};

struct CompareReport {
    double a = 0.0;
    double b = 0.0;
    double h = 0.0;
    int N = 0;
    std::vector<CompareRow> rows;
    bool pass = true;
};

/// Solves, integrates the reduced system at h and 2h, and compares on [a, b].
/// A row passes when measured <= bound + 2 oracle_error + 1e-13 max(1, |u|), or
/// when the bound is not available.
CompareReport run_compare(const CauchyProblem& problem, const CompareOptions& options);

std::string to_text(const CompareReport& report);

} // namespace dtm

#include <dtm/report.hpp>

#include <dtm/oracle.hpp>
#include <dtm/reduce.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dtm {
namespace {

using json = nlohmann::ordered_json;

json real(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

json solution_json(const TaylorSolution& s) {
    json doc;
    doc["variables"] = json::array();
    for (std::size_t j = 0; j < s.vars.size(); ++j) {
        json coeffs = json::array();
        if (j < s.coefficients.size()) {
            for (double c : s.coefficients[j].coeffs()) coeffs.push_back(real(c));
        }
        doc["variables"].push_back({{"name", s.vars[j]}, {"coefficients", coeffs}});
    }
    doc["validity"] = {{"t_star", real(s.validity.t_star)},
                       {"t_alpha", real(s.validity.t_alpha)},
                       {"upper", real(s.validity.upper)}};
    // top-level bound is the worst over variables; null when any is not computed
    json est = json::object();
    json per = json::array();
    int order = 0;
    double delta = 0.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < s.error_estimate.size(); ++j) {
        const ErrorEstimate& e = s.error_estimate[j];
        order = e.N;
        delta = e.delta;
        worst = std::max(worst, e.bound);
        per.push_back({{"name", s.vars[j]}, {"bound", real(e.bound)}});
    }
    est["N"] = order;
    est["delta"] = real(delta);
    est["bound"] = real(worst);
    est["per_variable"] = per;
    doc["error_estimate"] = est;
    doc["pivot_log"] = json::array();
    for (const PivotEntry& p : s.pivot_log) {
        doc["pivot_log"].push_back(
            {{"equation", s.vars[static_cast<std::size_t>(p.equation)]}, {"k", p.k}, {"pivot", real(p.pivot)}});
    }
    return doc;
}

void csv_table(std::ostringstream& out, const TaylorSolution& s) {
    std::size_t width = 0;
    for (const Series& c : s.coefficients) width = std::max(width, c.size());
    out << "var";
    for (std::size_t k = 0; k < width; ++k) out << ",k" << k;
    out << '\n';
    for (std::size_t j = 0; j < s.vars.size(); ++j) {
        out << s.vars[j];
        if (j < s.coefficients.size()) {
            for (double c : s.coefficients[j].coeffs()) out << ',' << format_real(c);
        }
        out << '\n';
    }
    out << "# validity t_star=" << format_real(s.validity.t_star) << " t_alpha=" << format_real(s.validity.t_alpha)
        << " upper=" << format_real(s.validity.upper) << '\n';
    for (std::size_t j = 0; j < s.error_estimate.size(); ++j) {
        const ErrorEstimate& e = s.error_estimate[j];
        out << "# error_estimate " << s.vars[j] << " N=" << e.N << " delta=" << format_real(e.delta)
            << " bound=" << format_real(e.bound) << '\n';
    }
    for (const PivotEntry& p : s.pivot_log) {
        out << "# pivot " << s.vars[static_cast<std::size_t>(p.equation)] << " k=" << p.k
            << " value=" << format_real(p.pivot) << '\n';
    }
}

} // namespace

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const TaylorSolution& solution) {
    std::ostringstream out;
    csv_table(out, solution);
    return out.str();
}

std::string to_json(const TaylorSolution& solution) { return solution_json(solution).dump(2) + "\n"; }

std::string to_csv(const SolveError& error) {
    std::ostringstream out;
    csv_table(out, error.partial());
    out << "# error " << name(error.kind()) << " equation=" << error.partial().vars.at(static_cast<std::size_t>(error.equation()))
        << " k=" << error.k() << " pivot=" << format_real(error.pivot()) << " residual=" << format_real(error.residual())
        << '\n';
    return out.str();
}

std::string to_json(const SolveError& error) {
    json doc = solution_json(error.partial());
    doc["error"] = {{"kind", std::string(name(error.kind()))},
                    {"equation", error.partial().vars.at(static_cast<std::size_t>(error.equation()))},
                    {"k", error.k()},
                    {"pivot", real(error.pivot())},
                    {"residual", real(error.residual())},
                    {"message", error.what()}};
    return doc.dump(2) + "\n";
}

InfoReport build_info(const CauchyProblem& problem) {
    validate(problem);
    InfoReport info;
    info.n = problem.n;
    info.p = problem.p();
    info.r = static_cast<int>(problem.delays.size());
    for (const DelaySpec& d : problem.delays) info.delay_ids.push_back(d.id);
    info.structure = analyze(problem.equations, problem.n, problem.p(), problem.delays);
    info.validity = compute_validity(problem);
    info.h2 = check_h2(problem, info.structure);
    info.compatibility = check_compatibility(problem);
    return info;
}

std::string to_text(const InfoReport& info, const CauchyProblem& problem) {
    std::ostringstream out;
    out << "n = " << info.n << "\np = " << info.p << "\nr = " << info.r << '\n';
    for (std::size_t i = 0; i < problem.delays.size(); ++i) {
        const DelaySpec& d = problem.delays[i];
        out << "delay " << d.id << " (" << name(d.kind) << ", alpha(t) = " << to_string(d.argument())
            << "): m = " << info.structure.delay_max_deriv[i] << '\n';
    }
    out << "omega = " << info.structure.omega << "\nm = " << info.structure.m
        << "\nneutral = " << (info.structure.neutral ? "yes" : "no") << '\n';
    out << "t_star = " << format_real(info.validity.t_star) << "\nt_alpha = " << format_real(info.validity.t_alpha)
        << "\nupper = " << format_real(info.validity.upper) << '\n';
    for (const DelayCrossing& c : info.validity.per_delay) {
        out << "  crossing " << c.id << ": ";
        if (c.excluded) {
            out << "excluded";
        } else {
            out << format_real(c.t_alpha);
        }
        if (!c.note.empty()) out << " (" << c.note << ")";
        out << '\n';
    }
    out << "H2: " << (info.h2.pass ? "pass" : "FAIL") << '\n';
    for (const H2Violation& v : info.h2.violations) {
        out << "  equation " << problem.vars[static_cast<std::size_t>(v.equation)] << " uses "
            << problem.vars[static_cast<std::size_t>(v.var)] << std::string(static_cast<std::size_t>(problem.n), '\'')
            << "@" << v.delay << '\n';
    }
    out << "compatibility: " << (info.compatibility.pass ? "pass" : "FAIL");
    if (info.compatibility.entries.empty()) out << " (no initial functions)";
    out << '\n';
    for (const CompatibilityEntry& e : info.compatibility.entries) {
        out << "  " << problem.vars[static_cast<std::size_t>(e.var)] << " k=" << e.k << ": init "
            << format_real(e.init) << ", phi " << format_real(e.phi) << ", residual " << format_real(e.residual)
            << (e.pass ? "" : "  FAIL") << '\n';
    }
    return out.str();
}

CompareReport run_compare(const CauchyProblem& problem, const CompareOptions& options) {
    validate(problem);
    const ReducedSystem reduced = substitute_history(problem);
    check_oracle_compatible(reduced);
    const TaylorSolution solution = solve(problem);

    CompareReport report;
    report.N = solution.order;
    report.h = options.h;
    report.a = options.a.value_or(0.0);
    report.b = options.b.value_or(solution.validity.upper);
    if (!(report.a >= 0.0) || !(report.b > report.a) || report.b > solution.validity.upper) {
        throw ValidationError("comparison interval [" + format_real(report.a) + ", " + format_real(report.b) +
                              "] must lie inside [0, " + format_real(solution.validity.upper) + "]");
    }
    if (options.samples < 2) throw ValidationError("at least 2 samples are required");

    const DenseTrajectory fine = integrate_reference(reduced, options.h, report.b);
    const DenseTrajectory coarse = integrate_reference(reduced, 2.0 * options.h, report.b);
    const std::vector<double> measured = compare(solution, fine, report.a, report.b, options.samples);
    const std::vector<ErrorEstimate> estimate = estimate_error(solution, report.b);

    std::vector<double> oracle_gap(static_cast<std::size_t>(reduced.p()), 0.0);
    std::vector<double> scale(static_cast<std::size_t>(reduced.p()), 1.0);
    for (int i = 0; i < options.samples; ++i) {
        const double t = report.a + (report.b - report.a) * i / (options.samples - 1);
        for (int j = 0; j < reduced.p(); ++j) {
            const double f = fine.sample(j, 0, t);
            const auto ju = static_cast<std::size_t>(j);
            oracle_gap[ju] = std::max(oracle_gap[ju], std::abs(f - coarse.sample(j, 0, t)));
            scale[ju] = std::max(scale[ju], std::abs(f));
        }
    }

    for (std::size_t j = 0; j < measured.size(); ++j) {
        CompareRow row;
        row.var = solution.vars[j];
        row.measured = measured[j];
        row.bound = estimate[j].bound;
        row.oracle_error = oracle_gap[j] / 15.0;
        row.pass = !std::isfinite(row.bound) ||
                   row.measured <= row.bound + 2.0 * row.oracle_error + 1e-13 * scale[j];
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

std::string to_text(const CompareReport& report) {
    std::ostringstream out;
    out << "interval [" << format_real(report.a) << ", " << format_real(report.b) << "], N = " << report.N
        << ", h = " << format_real(report.h) << '\n';
    out << "var,max_error,bound,oracle_error,status\n";
    for (const CompareRow& row : report.rows) {
        std::string bound = std::isfinite(row.bound) ? format_real(row.bound) : "not computed";
        if (row.bound == 0.0) bound = "0 (exact)";
        out << row.var << ',' << format_real(row.measured) << ',' << bound << ',' << format_real(row.oracle_error)
            << ',' << (row.pass ? "pass" : "FAIL") << '\n';
    }
    return out.str();
}

} // namespace dtm

#include <dtm/problem.hpp>

#include <dtm/error.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dtm {
namespace {

constexpr int positivity_samples = 1000;
constexpr double crossing_tolerance = 1e-10;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double infimum_of_argument(const DelaySpec& d, double horizon) {
    switch (d.kind) {
    case DelayKind::constant: return -d.value;
    case DelayKind::proportional: return 0.0;
    case DelayKind::time_dependent: {
        double lo = d.argument_at(0.0);
        for (int i = 1; i <= positivity_samples; ++i) {
            lo = std::min(lo, d.argument_at(horizon * i / positivity_samples));
        }
        return lo;
    }
    }
    return 0.0;
}

} // namespace

bool CauchyProblem::has_history_delays() const noexcept {
    return std::any_of(delays.begin(), delays.end(),
                       [](const DelaySpec& d) { return d.kind != DelayKind::proportional; });
}

ParseContext CauchyProblem::parse_context() const {
    ParseContext ctx;
    ctx.vars = vars;
    for (const auto& d : delays) ctx.delays.push_back(d.id);
    ctx.max_deriv = n;
    return ctx;
}

void validate(const CauchyProblem& problem) {
    const int p = problem.p();
    if (problem.n < 1) throw ValidationError("order n must be at least 1");
    if (p < 1) throw ValidationError("at least one variable is required");
    if (static_cast<int>(problem.equations.size()) != p) {
        throw ValidationError("expected one equation per variable");
    }
    if (static_cast<int>(problem.init.size()) != p) {
        throw ValidationError("expected initial conditions for every variable");
    }
    for (int j = 0; j < p; ++j) {
        if (static_cast<int>(problem.init[j].size()) != problem.n) {
            throw ValidationError("init for '" + problem.vars[j] + "' must list exactly " + std::to_string(problem.n) +
                                  " values");
        }
    }
    if (!(problem.horizon > 0.0) || !std::isfinite(problem.horizon)) {
        throw ValidationError("horizon must be a positive real");
    }
    if (problem.trunc_order < problem.n) {
        throw ValidationError("taylor_order must be at least the equation order n");
    }
    for (const auto& d : problem.delays) {
        switch (d.kind) {
        case DelayKind::constant:
            if (!(d.value > 0.0)) throw ValidationError("constant delay '" + d.id + "' needs tau > 0");
            break;
        case DelayKind::proportional:
            if (!(d.value > 0.0 && d.value < 1.0)) {
                throw ValidationError("proportional delay '" + d.id + "' needs 0 < q < 1");
            }
            break;
        case DelayKind::time_dependent:
            if (contains_state_ref(d.tau)) {
                throw ValidationError("time-dependent delay '" + d.id + "' must depend on t only");
            }
            break;
        }
    }
    if (problem.phi.size() != static_cast<std::size_t>(p)) {
        throw ValidationError("phi table must have one slot per variable");
    }
    const bool needs_phi = problem.has_history_delays();
    for (int j = 0; j < p; ++j) {
        const bool given = problem.phi[j].has_value();
        if (needs_phi && !given) {
            throw ValidationError("initial function phi for '" + problem.vars[j] +
                                  "' is required when constant or time-dependent delays are present");
        }
        if (!needs_phi && given) {
            throw ValidationError("initial function phi for '" + problem.vars[j] +
                                  "' given but all delays are proportional");
        }
        if (given && contains_state_ref(*problem.phi[j])) {
            throw ValidationError("phi for '" + problem.vars[j] + "' must depend on t only");
        }
    }

    // tau(t) > 0 is checked by sampling on [t*, T*].
    double t_star = 0.0;
    for (const auto& d : problem.delays) t_star = std::min(t_star, infimum_of_argument(d, problem.horizon));
    for (const auto& d : problem.delays) {
        if (d.kind != DelayKind::time_dependent) continue;
        for (int i = 0; i <= positivity_samples; ++i) {
            const double t = t_star + (problem.horizon - t_star) * i / positivity_samples;
            const double tau = evaluate_in_time(d.tau, t);
            if (!(tau > 0.0)) {
                throw ValidationError("time-dependent delay '" + d.id + "' has tau(" + fmt(t) + ") = " + fmt(tau) +
                                      " <= 0");
            }
        }
    }
}

std::optional<double> first_crossing(const DelaySpec& delay, double horizon, int steps, int iterations) {
    double prev_t = 0.0;
    double prev_g = delay.argument_at(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double t = horizon * i / steps;
        const double g = delay.argument_at(t);
        if (prev_g <= 0.0 && g > 0.0) {
            double lo = prev_t;
            double hi = t;
            for (int it = 0; it < iterations; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (delay.argument_at(mid) > 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            const double glo = delay.argument_at(lo);
            const double ghi = delay.argument_at(hi);
            const double root = std::abs(glo) <= std::abs(ghi) ? lo : hi;
            if (!(std::abs(delay.argument_at(root)) < crossing_tolerance) || !(root > 0.0)) {
                throw ValidationError("crossing search for delay '" + delay.id + "' did not converge near t = " +
                                      fmt(root));
            }
            return root;
        }
        prev_t = t;
        prev_g = g;
    }
    return std::nullopt;
}

ValidityInterval compute_validity(const CauchyProblem& problem) {
    ValidityInterval v;
    v.t_star = 0.0;
    for (const auto& d : problem.delays) {
        v.t_star = std::min(v.t_star, infimum_of_argument(d, problem.horizon));

        DelayCrossing c;
        c.id = d.id;
        switch (d.kind) {
        case DelayKind::constant:
            c.t_alpha = d.value;
            break;
        case DelayKind::proportional:
            c.t_alpha = 0.0;
            c.excluded = true;
            c.note = "proportional";
            break;
        case DelayKind::time_dependent:
            if (d.argument_at(0.0) > 0.0) {
                c.t_alpha = 0.0;
                c.excluded = true;
                c.note = "argument already positive at t = 0";
            } else if (auto root = first_crossing(d, problem.horizon)) {
                c.t_alpha = *root;
            } else {
                c.t_alpha = std::numeric_limits<double>::infinity();
                c.note = "no crossing on [0, T*]";
            }
            break;
        }
        if (!c.excluded) v.t_alpha = std::min(v.t_alpha, c.t_alpha);
        v.per_delay.push_back(std::move(c));
    }
    v.upper = std::min(v.t_alpha, problem.horizon);
    return v;
}

CompatibilityReport check_compatibility(const CauchyProblem& problem) {
    CompatibilityReport report;
    const auto order = static_cast<std::size_t>(problem.n - 1);
    for (int j = 0; j < problem.p(); ++j) {
        if (j >= static_cast<int>(problem.phi.size()) || !problem.phi[j]) continue;
        const Series s = series_in_time(*problem.phi[j], Series::monomial(1, order));
        double factorial = 1.0;
        for (int k = 0; k < problem.n; ++k) {
            if (k > 0) factorial *= k;
            const double phi_k = factorial * s[static_cast<std::size_t>(k)];
            const double init_k = problem.init[j][k];
            const double residual = init_k - phi_k;
            const bool pass = std::abs(residual) <= compatibility_tolerance;
            report.entries.push_back({j, k, init_k, phi_k, residual, pass});
            report.pass = report.pass && pass;
        }
    }
    return report;
}

H2Report check_h2(const CauchyProblem& problem, const StructureReport& structure) {
    H2Report report;
    for (const auto& site : structure.refs) {
        const StateRef& r = site.ref;
        if (r.deriv != problem.n || !r.delay) continue;
        const DelaySpec& d = problem.delays[*r.delay];
        if (d.kind == DelayKind::proportional && r.var != site.equation) {
            report.violations.push_back({site.equation, r.var, d.id});
            report.pass = false;
        }
    }
    return report;
}

} // namespace dtm

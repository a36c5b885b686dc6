#include <dtm/structure.hpp>

#include <dtm/error.hpp>

#include <algorithm>
#include <numeric>

namespace dtm {

std::string_view name(DelayKind kind) noexcept {
    switch (kind) {
    case DelayKind::constant: return "constant";
    case DelayKind::proportional: return "proportional";
    case DelayKind::time_dependent: return "time-dependent";
    }
    return "?";
}

DelaySpec DelaySpec::constant(std::string id, double tau) {
    return DelaySpec{std::move(id), DelayKind::constant, tau, Expr{}};
}

DelaySpec DelaySpec::proportional(std::string id, double q) {
    return DelaySpec{std::move(id), DelayKind::proportional, q, Expr{}};
}

DelaySpec DelaySpec::time_dependent(std::string id, Expr tau) {
    return DelaySpec{std::move(id), DelayKind::time_dependent, 0.0, std::move(tau)};
}

Expr DelaySpec::argument() const {
    switch (kind) {
    case DelayKind::constant: return make_time() - make_const(value);
    case DelayKind::proportional: return make_const(value) * make_time();
    case DelayKind::time_dependent: return make_time() - tau;
    }
    throw std::invalid_argument("unknown delay kind");
}

double DelaySpec::argument_at(double t) const {
    switch (kind) {
    case DelayKind::constant: return t - value;
    case DelayKind::proportional: return value * t;
    case DelayKind::time_dependent: return t - evaluate_in_time(tau, t);
    }
    throw std::invalid_argument("unknown delay kind");
}

StructureReport analyze(std::span<const Expr> equations, int n, int p, std::span<const DelaySpec> delays) {
    if (static_cast<int>(equations.size()) != p) {
        throw ValidationError("expected " + std::to_string(p) + " equations, got " + std::to_string(equations.size()));
    }
    StructureReport report;
    report.delay_max_deriv.assign(delays.size(), 0);
    report.neutral_proportional.resize(equations.size());

    for (std::size_t j = 0; j < equations.size(); ++j) {
        for_each_state_ref(equations[j], [&](const StateRef& r) {
            const std::string where = " in equation " + std::to_string(j + 1);
            if (r.var < 0 || r.var >= p) {
                throw ValidationError("state reference to undeclared variable '" + r.var_name + "'" + where);
            }
            if (r.deriv < 0 || r.deriv > n) {
                throw ValidationError("derivative order " + std::to_string(r.deriv) + " of '" + r.var_name +
                                      "' exceeds n = " + std::to_string(n) + where);
            }
            if (!r.delay) {
                if (r.deriv >= n) {
                    throw ValidationError("undelayed derivative '" + r.var_name + std::string(r.deriv, '\'') +
                                          "' of order n on the right-hand side" + where);
                }
            } else {
                const int d = *r.delay;
                if (d < 0 || d >= static_cast<int>(delays.size())) {
                    throw ValidationError("reference to undeclared delay '" + r.delay_name + "'" + where);
                }
                report.delay_max_deriv[d] = std::max(report.delay_max_deriv[d], r.deriv);
                if (r.deriv == n && delays[d].kind == DelayKind::proportional) {
                    report.neutral_proportional[j].push_back(r);
                }
            }
            report.refs.push_back(RefSite{static_cast<int>(j), r});
        });
    }
    if (!delays.empty()) {
        report.m = *std::max_element(report.delay_max_deriv.begin(), report.delay_max_deriv.end());
    }
    report.omega = std::accumulate(report.delay_max_deriv.begin(), report.delay_max_deriv.end(), 0);
    report.neutral = !delays.empty() && report.m == n;
    return report;
}

} // namespace dtm

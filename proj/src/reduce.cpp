#include <dtm/reduce.hpp>

#include <dtm/error.hpp>

#include <map>
#include <tuple>

namespace dtm {

Series delay_argument_series(const DelaySpec& delay, std::size_t order) {
    switch (delay.kind) {
    case DelayKind::constant:
        return add(Series::monomial(1, order), Series::constant(-delay.value, order));
    case DelayKind::time_dependent:
        return series_in_time(delay.argument(), Series::monomial(1, order));
    case DelayKind::proportional:
        break;
    }
    throw std::invalid_argument("delay_argument_series: proportional delay '" + delay.id + "' has no history series");
}

Series history_series(const Expr& phi, int d, const Series& alpha) {
    const std::size_t order = alpha.order();
    const double a0 = alpha[0];

    // phi(a0 + s) in powers of s, with d extra terms to absorb the derivative.
    std::vector<double> shifted(order + static_cast<std::size_t>(d) + 1, 0.0);
    shifted[0] = a0;
    if (shifted.size() > 1) shifted[1] = 1.0;
    const Series around = differentiate(series_in_time(phi, Series(std::move(shifted))), static_cast<std::size_t>(d));

    std::vector<double> beta(alpha.coeffs().begin(), alpha.coeffs().end());
    beta[0] = 0.0;
    return substitute(around, Series(std::move(beta)));
}

ReducedSystem substitute_history(const CauchyProblem& problem) {
    ReducedSystem out;
    out.n = problem.n;
    out.trunc_order = problem.trunc_order;
    out.vars = problem.vars;
    out.delays = problem.delays;
    out.init = problem.init;
    out.validity = compute_validity(problem);

    const auto order = static_cast<std::size_t>(problem.trunc_order + problem.n);
    std::map<int, Series> alpha_cache;
    std::map<std::tuple<int, int, int>, Expr> leaf_cache;

    auto replace = [&](const StateRef& r) -> std::optional<Expr> {
        if (!r.delay) return std::nullopt;
        const DelaySpec& delay = problem.delays.at(static_cast<std::size_t>(*r.delay));
        if (delay.kind == DelayKind::proportional) return std::nullopt;

        const auto key = std::make_tuple(r.var, r.deriv, *r.delay);
        if (auto it = leaf_cache.find(key); it != leaf_cache.end()) return it->second;

        if (r.var < 0 || r.var >= static_cast<int>(problem.phi.size()) || !problem.phi[r.var]) {
            throw ValidationError("no initial function for '" + r.var_name + "' referenced through delay '" +
                                  delay.id + "'");
        }
        auto a_it = alpha_cache.find(*r.delay);
        if (a_it == alpha_cache.end()) {
            a_it = alpha_cache.emplace(*r.delay, delay_argument_series(delay, order)).first;
        }
        try {
            Expr leaf = make_known(history_series(*problem.phi[r.var], r.deriv, a_it->second));
            leaf_cache.emplace(key, leaf);
            return leaf;
        } catch (const DomainError& err) {
            throw DomainError("history of '" + r.var_name + std::string(static_cast<std::size_t>(r.deriv), '\'') +
                              "@" + delay.id + "': " + err.what());
        }
    };

    out.equations.reserve(problem.equations.size());
    for (const auto& eq : problem.equations) {
        out.equations.push_back(rewrite_state_refs(eq, replace));
    }
    return out;
}

} // namespace dtm

#include "oracles.hpp"

#include <dtm/engine.hpp>
#include <dtm/error.hpp>
#include <dtm/problem_file.hpp>

#include <doctest.h>

#include <cmath>

using namespace dtm;

namespace {

CauchyProblem fixture(const char* name) { return load_problem(std::string(DTM_FIXTURE_DIR) + "/" + name); }

CauchyProblem scalar_problem(const std::string& body, int N = 8) {
    return parse_problem("order = 1\nvars = u\nhorizon = 1\ntaylor_order = " + std::to_string(N) +
                         "\ninit u = [1]\n" + body);
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("transformed initial conditions") {
    const CoefficientTable t = transform_initial_conditions(fixture("example3.dde"));
    CHECK(t[0] == std::vector<double>{1, 1, 0.5});
    CHECK(t[1] == std::vector<double>{0, 0, 1});
}

TEST_CASE("example 1 closed form") {
    const TaylorSolution s = solve(fixture("example1.dde"));
    REQUIRE(s.order == 8);
    for (int k = 0; k <= 8; ++k) {
        CAPTURE(k);
        const auto K = static_cast<std::size_t>(k);
        CHECK(std::abs(s.coefficients[0][K] - 1.0 / oracle::factorial(k)) <= 1e-15);
        CHECK(std::abs(s.coefficients[1][K] - std::pow(0.5, k) / oracle::factorial(k)) <= 1e-15);
        const double u3 = k == 0 ? 0.0 : std::pow(3.0, k - 1) / oracle::factorial(k - 1);
        CHECK(std::abs(s.coefficients[2][K] - u3) <= 1e-12);
    }
    CHECK(s.pivot_log.empty());
    CHECK(s.next.size() == 3);
    CHECK(s.next[0] == doctest::Approx(1.0 / oracle::factorial(9)));
}

TEST_CASE("example 2 is reproduced exactly") {
    const TaylorSolution s = solve(fixture("example2.dde"));
    for (std::size_t k = 0; k <= 10; ++k) {
        CHECK(std::abs(s.coefficients[0][k] - (k == 2 ? 2.0 : 0.0)) <= 1e-12);
        CHECK(std::abs(s.coefficients[1][k] - (k == 2 ? 1.0 : 0.0)) <= 1e-12);
    }
    for (const ErrorEstimate& e : s.error_estimate) CHECK(e.bound == 0.0);
}

TEST_CASE("example 3 stops at the zero pivot") {
    try {
        solve(fixture("example3.dde"));
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveErrorKind::zero_pivot_inconsistent);
        CHECK(e.equation() == 1);
        CHECK(e.k() == 0);
        CHECK(e.pivot() == 0.0);
        CHECK(e.residual() == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(std::string(e.what()).find("equation u2 at k=0") != std::string::npos);
        REQUIRE(e.partial().coefficients.size() == 2);
        CHECK(e.partial().order == 2);
        CHECK(e.partial().coefficients[1] == Series({0, 0, 1}));
    }
}

TEST_CASE("example 3 first equation") {
    const TaylorSolution s = solve(fixture("example3_u1.dde"));
    const double e2 = std::exp(-2.0);
    CHECK(s.coefficients[0][3] == doctest::Approx(e2 / 6.0).epsilon(1e-14));
    // 24 U(4) = e^{-2} (U(1)/3 + U(0)) + F(1) + 2 + 1 with F(1) = 2/3
    CHECK(s.coefficients[0][4] == doctest::Approx((e2 * 4.0 / 3.0 + 2.0 / 3.0 + 3.0) / 24.0).epsilon(1e-14));
}

TEST_CASE("neutral proportional pivot") {
    // u'(t) = u'(t/2)/2 + u: (k+1) U(k+1) (1 - 2^{-(k+1)}) = U(k)
    const TaylorSolution s = solve(scalar_problem("delay a = proportional(1/2)\neq u' = 1/2*u'@a + u\n"));
    double u = 1.0;
    for (int k = 0; k < 8; ++k) {
        u = u / ((k + 1) * (1.0 - std::pow(0.5, k + 1)));
        CHECK(s.coefficients[0][static_cast<std::size_t>(k + 1)] == doctest::Approx(u).epsilon(1e-14));
    }
    REQUIRE(s.pivot_log.size() == 9);
    CHECK(s.pivot_log[0].pivot == doctest::Approx(0.5));
    CHECK(s.pivot_log[3].pivot == doctest::Approx(1.0 - 1.0 / 16.0));
}

TEST_CASE("pivot failures") {
    try {
        solve(scalar_problem("delay a = proportional(1/2)\neq u' = u'@a\n"));
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveErrorKind::zero_pivot_underdetermined);
        CHECK(e.k() == 0);
    }
    try {
        solve(scalar_problem("delay a = proportional(1/2)\neq u' = u'@a + 1\n"));
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveErrorKind::zero_pivot_inconsistent);
        CHECK(e.residual() == doctest::Approx(1.0));
    }
}

TEST_CASE("nonlinear neutral terms are rejected") {
    const auto delays = std::vector<DelaySpec>{DelaySpec::proportional("a", 0.5)};
    const ParseContext ctx{{"u"}, {"a"}, 1};
    CHECK(find_nonlinear_neutral(parse_expression("2*u'@a - u'@a/3 + u^2", ctx), 1, delays) == std::nullopt);
    CHECK(find_nonlinear_neutral(parse_expression("exp(t)*u'@a", ctx), 1, delays) == std::nullopt);
    CHECK(find_nonlinear_neutral(parse_expression("(u'@a)^2", ctx), 1, delays).has_value());
    CHECK(find_nonlinear_neutral(parse_expression("u*u'@a", ctx), 1, delays).has_value());
    CHECK(find_nonlinear_neutral(parse_expression("1/u'@a", ctx), 1, delays).has_value());
    try {
        solve(scalar_problem("delay a = proportional(1/2)\neq u' = sin(u'@a)\n"));
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveErrorKind::nonlinear_neutral);
    }
}

TEST_CASE("H2 violations stop the pipeline") {
    const CauchyProblem p = parse_problem(
        "order = 1\nvars = u, w\nhorizon = 1\ntaylor_order = 4\ndelay a = proportional(0.5)\n"
        "eq u' = w'@a\neq w' = u\ninit u = [1]\ninit w = [0]\n");
    CHECK_THROWS_AS(solve(p), ValidationError);
}

TEST_CASE("domain failures inside the recurrence") {
    try {
        solve(parse_problem("order = 1\nvars = u\nhorizon = 1\ntaylor_order = 4\ninit u = [-1]\neq u' = ln(u)\n"));
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveErrorKind::domain);
        CHECK(std::string(e.what()).find("ln") != std::string::npos);
    }
}

TEST_CASE("error estimate") {
    const TaylorSolution s = solve(fixture("example1.dde"));
    const auto est = estimate_error(s, 0.5);
    REQUIRE(est.size() == 3);
    CHECK(est[0].N == 8);
    CHECK(est[0].delta == 0.5);
    CHECK(est[0].convergent);
    CHECK(est[0].bound > 0.0);
    // rho = 1/9, so bound = delta^9 / 9! / (1 - 0.5/9)
    CHECK(est[0].bound == doctest::Approx(std::pow(0.5, 9) / oracle::factorial(9) / (1.0 - 0.5 / 9.0)));
    CHECK(est[0].K_hat == doctest::Approx(1.0 / (1.0 - 0.5 / 9.0)));
    CHECK_THROWS_AS(estimate_error(s, 0.0), ValidationError);
    CHECK_THROWS_AS(estimate_error(s, 1.5), ValidationError);

    // a tail growing faster than 1/delta is not bounded
    const TaylorSolution fast = solve(scalar_problem("eq u' = 10*u\n", 4));
    const auto e = estimate_error(fast, 1.0);
    CHECK_FALSE(e[0].convergent);
    CHECK(std::isinf(e[0].bound));
}

TEST_CASE("evaluation respects the validity interval") {
    const TaylorSolution s = solve(fixture("example2.dde"));
    const auto v = evaluate_solution(s, 0.5);
    CHECK(v[0] == doctest::Approx(0.5));
    CHECK(v[1] == doctest::Approx(0.25));
    CHECK_THROWS_AS(evaluate_solution(s, 1.5), ValidationError);
    CHECK_THROWS_AS(evaluate_solution(s, -0.1), ValidationError);
    CHECK(evaluate_solution(s, 1.5, false)[0] == doctest::Approx(2.0 * 2.25));
}

TEST_CASE("residual of the computed polynomial") {
    for (const char* f : {"example1.dde", "example2.dde", "example3_u1.dde"}) {
        CAPTURE(f);
        const CauchyProblem p = fixture(f);
        const TaylorSolution s = solve(p);
        const ReducedSystem r = substitute_history(p);
        for (const Series& res : residual(r, s)) {
            CHECK(res.order() == static_cast<std::size_t>(p.trunc_order - p.n));
            for (double c : res.coeffs()) CHECK(std::abs(c) <= 1e-12);
        }
    }
}

TEST_CASE("order override changes only the length") {
    CauchyProblem p = fixture("example1.dde");
    const TaylorSolution a = solve(p);
    p.trunc_order = 12;
    const TaylorSolution b = solve(p);
    for (std::size_t j = 0; j < 3; ++j) CHECK(b.coefficients[j].prefix(8) == a.coefficients[j]);
}

}

#include <doctest.h>

#include <cmath>

#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"

using namespace ezheston;

namespace {

MarketParams baseline_market() {
    MarketParams m;
    m.r = 0.05;
    m.xi = 7.0 / 15.0;
    m.kappa = 5.0;
    m.theta = 0.0225;
    m.sigma = 0.25;
    m.rho = -0.5;
    m.nu0 = 0.0225;
    return m;
}

PreferenceParams unit_prefs() {
    PreferenceParams p;
    p.beta = 0.08;
    p.gamma = 2.0;
    p.phi = 1.0;
    return p;
}

// Oracle: bisection on the audited slope quadratic. Independent of the
// stable-formula root selection in the solver.
double bisect_root(const QuadraticCoeffs& q, double lo, double hi) {
    auto f = [&](double x) { return (q.a1 * x + q.a2) * x + q.a3; };
    double flo = f(lo);
    REQUIRE(flo * f(hi) < 0.0);
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        (f(mid) * flo > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("unit-EIS slope matches a bisection oracle") {
    auto sol = solve_unit_eis(baseline_market(), unit_prefs());
    double oracle = bisect_root(sol.quad, 0.0, 10.0);
    CHECK(std::abs(sol.A1 - oracle) <= 1e-12);
    CHECK(sol.A1 > 0.0);
}

TEST_CASE("unit-EIS consumption fraction equals the impatience rate exactly") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    for (double nu : {0.005, 0.0225, 0.09}) {
        auto st = strategy_infinite(sol, m, p, nu);
        CHECK(st.c_over_x == p.beta); // bitwise
    }
}

TEST_CASE("risky weight decomposes into myopic and hedging parts") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    auto st = strategy_infinite(sol, m, p, m.theta);
    double myopic = m.xi / p.gamma;
    double hedge = m.rho * m.sigma * (1.0 - p.gamma) / p.gamma * sol.A1;
    CHECK(st.pi == doctest::Approx(myopic + hedge).epsilon(1e-14));
    CHECK(st.psi == doctest::Approx(st.pi * std::sqrt(m.theta)).epsilon(1e-14));
    // weight does not depend on the variance level
    auto st2 = strategy_infinite(sol, m, p, 4.0 * m.theta);
    CHECK(st.pi == doctest::Approx(st2.pi).epsilon(1e-15));
}

TEST_CASE("log branch has a closed slope") {
    auto m = baseline_market();
    auto p = unit_prefs();
    p.gamma = 1.0;
    auto sol = solve_unit_eis(m, p);
    CHECK(sol.tag == CaseTag::LogUtility);
    double expected = m.xi * m.xi / (2.0 * (p.beta + m.kappa));
    CHECK(sol.A1 == doctest::Approx(expected).epsilon(1e-14));
    auto st = strategy_infinite(sol, m, p, m.theta);
    CHECK(st.c_over_x == p.beta);
    CHECK(st.pi == doctest::Approx(m.xi).epsilon(1e-14)); // myopic only
}

TEST_CASE("slope is continuous through gamma = 1") {
    auto m = baseline_market();
    auto p = unit_prefs();
    double log_slope = m.xi * m.xi / (2.0 * (p.beta + m.kappa));
    for (double g : {1.0 - 1e-4, 1.0 + 1e-4}) {
        p.gamma = g;
        auto sol = solve_unit_eis(m, p);
        CHECK(std::abs(sol.A1 - log_slope) <= 1e-3 * log_slope);
    }
}

TEST_CASE("general-EIS fixed point at the baseline calibration") {
    auto m = baseline_market();
    auto p = unit_prefs();
    p.phi = 0.125;
    auto gs = solve_general_eis(m, p);

    CHECK(gs.affine.tag == CaseTag::InfGeneral);
    CHECK(gs.affine.A1 < 0.0);
    CHECK(gs.affine.A1 == doctest::Approx(-0.009478569649).epsilon(1e-9));
    CHECK(gs.affine.A0 == doctest::Approx(2.588050868).epsilon(1e-9));
    CHECK(gs.loglin.zeta2 == doctest::Approx(0.05482803214).epsilon(1e-9));
    CHECK(gs.loglin.zeta2 > 0.0);
    CHECK(gs.loglin.zeta1 ==
          doctest::Approx(gs.loglin.zeta2 * (1.0 - gs.loglin.mean_log_cw))
              .epsilon(1e-12));
    CHECK(gs.loglin.final_residual <= 1e-12);

    SUBCASE("consumption fraction sits at the linearization anchor") {
        auto st = strategy_infinite(gs.affine, m, p, m.theta);
        CHECK(st.c_over_x == doctest::Approx(gs.loglin.zeta2).epsilon(1e-9));
        CHECK(st.c_over_x == doctest::Approx(std::exp(gs.loglin.mean_log_cw))
                                 .epsilon(1e-9));
    }
    SUBCASE("damping choice does not move the answer") {
        FixedPointOptions opt;
        opt.damping = 0.3;
        auto gs2 = solve_general_eis(m, p, opt);
        CHECK(gs2.affine.A1 == doctest::Approx(gs.affine.A1).epsilon(1e-10));
    }
    SUBCASE("starving the iteration raises NonConvergence") {
        FixedPointOptions opt;
        opt.max_iter = 2;
        CHECK_THROWS_AS(solve_general_eis(m, p, opt), NonConvergence);
    }
}

TEST_CASE("general solver rejects unit branches") {
    auto m = baseline_market();
    auto p = unit_prefs();
    CHECK_THROWS_AS(solve_general_eis(m, p), InvalidPreferences);
    p.phi = 0.125;
    p.gamma = 1.0;
    CHECK_THROWS_AS(solve_general_eis(m, p), InvalidPreferences);
}

TEST_CASE("negative slope discriminant is reported, not swallowed") {
    MarketParams m;
    m.r = 0.05;
    m.xi = 1.0;
    m.kappa = 7.59;
    m.theta = 0.04;
    m.sigma = 2.0;
    m.rho = 0.95;
    m.nu0 = 0.04;
    PreferenceParams p;
    p.beta = 0.005;
    p.gamma = 0.2;
    p.phi = 1.0;
    CHECK_THROWS_AS(solve_unit_eis(m, p), NoRealRoot);
}

TEST_CASE("value function shape") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    double lo = value_function_infinite(sol, m, p, 1.0, m.theta);
    double hi = value_function_infinite(sol, m, p, 2.0, m.theta);
    CHECK(lo < 0.0); // gamma > 1
    CHECK(hi > lo);  // increasing in wealth

    p.gamma = 1.0;
    auto logsol = solve_unit_eis(m, p);
    double v1 = value_function_infinite(logsol, m, p, 1.0, m.theta);
    double v2 = value_function_infinite(logsol, m, p, std::exp(1.0), m.theta);
    CHECK(v2 - v1 == doctest::Approx(1.0).epsilon(1e-12)); // ln x offset
}

TEST_CASE("solver validates its inputs") {
    auto m = baseline_market();
    auto p = unit_prefs();
    m.rho = 2.0;
    CHECK_THROWS_AS(solve_unit_eis(m, p), ValidationError);
    m = baseline_market();
    p.beta = 0.0;
    CHECK_THROWS_AS(solve_unit_eis(m, p), InvalidPreferences);

    m = baseline_market();
    p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    CHECK_THROWS_AS(strategy_infinite(sol, m, p, -0.1), DomainError);
    CHECK_THROWS_AS(value_function_infinite(sol, m, p, 0.0, m.theta), DomainError);
}

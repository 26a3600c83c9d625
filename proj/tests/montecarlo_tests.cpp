#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"
#include "ezheston/montecarlo.hpp"
#include "ezheston/rng.hpp"

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
    m.x0 = 1.0;
    return m;
}

PreferenceParams unit_prefs() {
    PreferenceParams p;
    p.beta = 0.08;
    p.gamma = 2.0;
    p.phi = 1.0;
    return p;
}

// Oracle: invert Phi(x) = erfc(-x / sqrt 2) / 2 by bisection. The upper
// tail reflects to the lower one, where erfc keeps full relative precision
// and 1 - u is an exact subtraction.
double quantile_oracle(double u) {
    if (u > 0.5) return -quantile_oracle(1.0 - u);
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    double lo = -10.0, hi = 10.0;
    while (hi - lo > 1e-15) {
        double mid = 0.5 * (lo + hi);
        (cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Discrete mean recursion of the truncated Euler scheme, exact when paths
// stay positive: E[nu_k] = theta + (nu0 - theta) (1 - kappa dt)^k.
double euler_mean(const MarketParams& m, double dt, int k) {
    return m.theta + (m.nu0 - m.theta) * std::pow(1.0 - m.kappa * dt, k);
}

} // namespace

TEST_CASE("normal quantile matches the erfc bisection oracle") {
    for (double u : {1e-8, 1e-3, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        double x = inverse_normal_cdf(u);
        CHECK(std::abs(x - quantile_oracle(u)) <= 1e-12);
    }
    CHECK(inverse_normal_cdf(0.5) == 0.0);
    for (double u : {0.01, 0.2, 0.45})
        CHECK(inverse_normal_cdf(1.0 - u) ==
              doctest::Approx(-inverse_normal_cdf(u)).epsilon(1e-12));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(-0.1), DomainError);
}

TEST_CASE("substreams are reproducible and mutually distinct") {
    auto a = substream(42, 7);
    auto b = substream(42, 7);
    auto c = substream(42, 8);
    auto d = substream(43, 7);
    bool same_ab = true, same_ac = false, same_ad = false;
    for (int i = 0; i < 16; ++i) {
        auto va = a.next();
        same_ab &= (va == b.next());
        same_ac |= (va != c.next());
        same_ad |= (va != d.next());
    }
    CHECK(same_ab);
    CHECK(same_ac);
    CHECK(same_ad);
}

TEST_CASE("run shape validation") {
    SimConfig cfg;
    cfg.n_paths = 10;
    cfg.dt = 0.01;
    cfg.T_sim = 1.0;
    CHECK(sim_steps(cfg) == 100);

    cfg.n_paths = 0;
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
    cfg.n_paths = 3;
    cfg.antithetic = true;
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
    cfg = {};
    cfg.dt = 0.0;
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
    cfg = {};
    cfg.T_sim = -1.0;
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
    cfg = {};
    cfg.T_sim = 1.0;
    cfg.dt = 0.3; // not a divisor
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
    cfg = {};
    cfg.T_sim = 1e6;
    cfg.dt = 1e-4;
    CHECK_THROWS_AS(sim_steps(cfg), ValidationError);
}

TEST_CASE("variance paths regenerate bitwise from (seed, index)") {
    auto m = baseline_market();
    m.nu0 = 0.04;
    SimConfig cfg;
    cfg.n_paths = 5;
    cfg.dt = 0.02;
    cfg.T_sim = 1.0;
    cfg.seed = 7;
    cfg.store_paths = true;
    auto ens = simulate_heston(m, cfg);

    int n = sim_steps(cfg);
    double sdt = std::sqrt(cfg.dt);
    auto g = substream(cfg.seed, 3);
    double nu_raw = m.nu0;
    for (int k = 0; k <= n; ++k) {
        double nup = nu_raw > 0.0 ? nu_raw : 0.0;
        CHECK(ens.nu[3][k] == nup);
        if (k == n) break;
        double z1 = standard_normal(g);
        standard_normal(g); // orthogonal wealth shock, unused here
        nu_raw += m.kappa * (m.theta - nup) * cfg.dt +
                  m.sigma * std::sqrt(nup) * sdt * z1;
    }

    auto again = simulate_heston(m, cfg);
    CHECK(again.nu_sum == ens.nu_sum);
    cfg.seed = 8;
    auto other = simulate_heston(m, cfg);
    CHECK(other.nu_sum != ens.nu_sum);
}

TEST_CASE("truncated Euler reproduces the stationary variance mean") {
    auto m = baseline_market(); // nu0 == theta
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 0.01;
    cfg.T_sim = 1.0;
    cfg.seed = 3;
    auto ens = simulate_heston(m, cfg);
    int n = sim_steps(cfg);
    for (int k = 1; k <= n; k += 9) {
        double mean = ens.nu_sum[k] / cfg.n_paths;
        double var = (ens.nu_sum_sq[k] - cfg.n_paths * mean * mean) /
                     (cfg.n_paths - 1);
        double se = std::sqrt(var / cfg.n_paths);
        CHECK(std::abs(mean - m.theta) <= 4.0 * se);
    }
}

TEST_CASE("truncated Euler tracks the discrete transient mean") {
    auto m = baseline_market();
    m.nu0 = 0.06;
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 0.01;
    cfg.T_sim = 1.0;
    cfg.seed = 11;
    auto ens = simulate_heston(m, cfg);
    for (int k : {20, 50, 100}) {
        double mean = ens.nu_sum[k] / cfg.n_paths;
        double var = (ens.nu_sum_sq[k] - cfg.n_paths * mean * mean) /
                     (cfg.n_paths - 1);
        double se = std::sqrt(var / cfg.n_paths);
        CHECK(std::abs(mean - euler_mean(m, cfg.dt, k)) <= 4.0 * se);
    }
}

TEST_CASE("zero vol-of-vol collapses to the deterministic recursion") {
    auto m = baseline_market();
    m.sigma = 0.0;
    m.nu0 = 0.08;
    SimConfig cfg;
    cfg.n_paths = 3;
    cfg.dt = 0.05;
    cfg.T_sim = 1.0;
    cfg.store_paths = true;
    auto ens = simulate_heston(m, cfg);
    for (int k = 0; k <= sim_steps(cfg); k += 5) {
        CHECK(ens.nu[0][k] == doctest::Approx(euler_mean(m, cfg.dt, k)).epsilon(1e-13));
        CHECK(ens.nu[1][k] == ens.nu[0][k]);
    }
}

TEST_CASE("antithetic pairing") {
    auto m = baseline_market();
    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.dt = 0.01;
    cfg.T_sim = 0.5;
    cfg.seed = 5;
    cfg.antithetic = true;
    cfg.store_paths = true;
    auto ens = simulate_heston(m, cfg);

    // first step is linear in the shock, so the pair mean is exact
    double det = m.nu0 + m.kappa * (m.theta - m.nu0) * cfg.dt;
    CHECK(0.5 * (ens.nu[0][1] + ens.nu[1][1]) ==
          doctest::Approx(det).epsilon(1e-13));
    CHECK(ens.nu[0][1] != ens.nu[1][1]);
    // pairs (0,1) and (2,3) use different substreams
    CHECK(ens.nu[0][1] != ens.nu[2][1]);
}

TEST_CASE("antithetic pairs cut the estimator variance") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 0.01;
    cfg.T_sim = 1.0;
    cfg.seed = 19;
    cfg.antithetic = true;
    auto wealth = simulate_wealth(m, p, sol, simulate_heston(m, cfg));

    const auto& l = wealth.terminal_log_wealth;
    int pairs = cfg.n_paths / 2;
    double mean = 0.0;
    for (double v : l) mean += v;
    mean /= cfg.n_paths;
    double var_indiv = 0.0, var_pair = 0.0;
    for (int j = 0; j < pairs; ++j) {
        double a = l[2 * j], b = l[2 * j + 1];
        var_indiv += (a - mean) * (a - mean) + (b - mean) * (b - mean);
        double pm = 0.5 * (a + b);
        var_pair += (pm - mean) * (pm - mean);
    }
    var_indiv /= cfg.n_paths - 1;
    var_pair /= pairs - 1;
    // independent pairing would give var_indiv / 2; mirrored shocks do much
    // better because the martingale part of log wealth cancels, leaving only
    // the variance-driven drift asymmetry
    CHECK(var_pair * 4.0 < 0.5 * var_indiv);
}

TEST_CASE("wealth pass under the stationary strategy") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 0.01;
    cfg.T_sim = 1.0;
    cfg.seed = 23;
    auto base = simulate_heston(m, cfg);
    auto wealth = simulate_wealth(m, p, sol, base);

    CHECK(wealth.wealth_attached);
    CHECK(wealth.all_positive);
    CHECK(wealth.c_ratio_min == p.beta); // constant ratio, bitwise
    CHECK(wealth.c_ratio_max == p.beta);

    auto s = summarize(wealth);
    CHECK(s.positive);
    CHECK(s.std_available);
    CHECK(s.n_paths == cfg.n_paths);
    CHECK(s.t.size() == static_cast<size_t>(sim_steps(cfg)) + 1);

    // drift is linear in nu and E[nu] = theta, so E[ln X_T] is available in
    // closed form for the discrete scheme
    auto st = strategy_infinite(sol, m, p, m.theta);
    double drift =
        m.r - p.beta + m.xi * m.theta * st.pi - 0.5 * st.pi * st.pi * m.theta;
    double exact = std::log(m.x0) + drift * cfg.T_sim;
    CHECK(std::abs(s.terminal_log_wealth_mean - exact) <=
          4.0 * s.terminal_log_wealth_se);

    SUBCASE("wealth pass is deterministic") {
        auto wealth2 = simulate_wealth(m, p, sol, base);
        CHECK(wealth2.terminal_log_wealth == wealth.terminal_log_wealth);
    }
}

TEST_CASE("single-path summary degrades gracefully") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    SimConfig cfg;
    cfg.n_paths = 1;
    cfg.dt = 0.01;
    cfg.T_sim = 0.2;
    auto s = summarize(simulate_wealth(m, p, sol, simulate_heston(m, cfg)));
    CHECK(s.n_paths == 1);
    CHECK_FALSE(s.std_available);
    CHECK(std::isnan(s.terminal_log_wealth_std));
    CHECK(std::isnan(s.terminal_log_wealth_se));
    CHECK(std::isnan(s.nu_se[1]));
    CHECK(std::isfinite(s.terminal_log_wealth_mean));
}

TEST_CASE("summary and CSV preconditions") {
    auto m = baseline_market();
    SimConfig cfg;
    cfg.n_paths = 2;
    cfg.dt = 0.1;
    cfg.T_sim = 0.5;
    cfg.store_paths = true;
    auto base = simulate_heston(m, cfg);
    CHECK_THROWS_AS(summarize(base), DomainError);
    std::ostringstream os;
    CHECK_THROWS_AS(write_paths_csv(os, base), DomainError);
    CHECK_THROWS_AS(simulate_wealth(m, unit_prefs(), AffineSolution{}, PathEnsemble{}),
                    GridMismatch);
}

TEST_CASE("per-path CSV layout") {
    auto m = baseline_market();
    auto p = unit_prefs();
    auto sol = solve_unit_eis(m, p);
    SimConfig cfg;
    cfg.n_paths = 3;
    cfg.dt = 0.1;
    cfg.T_sim = 0.5;
    cfg.store_paths = true;
    auto wealth = simulate_wealth(m, p, sol, simulate_heston(m, cfg));
    std::ostringstream os;
    write_paths_csv(os, wealth);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "path,t,nu,X,c_over_x");
    int rows = 0;
    std::string last;
    while (std::getline(is, line)) {
        last = line;
        ++rows;
    }
    CHECK(rows == 3 * (sim_steps(cfg) + 1));
    CHECK(last.rfind("2,", 0) == 0); // last row belongs to path 2
}

TEST_CASE("finite strategies refuse to simulate past their horizon") {
    auto m = baseline_market();
    PreferenceParams p = unit_prefs();
    p.horizon = Horizon::Finite;
    p.T = 1.0;
    auto path = solve_unit_eis_finite(m, p, TimeGrid{p.T, 200});
    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.dt = 0.25;
    cfg.T_sim = 2.0;
    auto base = simulate_heston(m, cfg);
    CHECK_THROWS_AS(simulate_wealth(m, p, path, base), GridMismatch);

    cfg.T_sim = 1.0; // exactly the horizon is fine
    auto ok = simulate_wealth(m, p, path, simulate_heston(m, cfg));
    CHECK(ok.wealth_attached);
    CHECK(ok.c_ratio_min == p.beta);
}

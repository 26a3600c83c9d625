#include "ezheston/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ezheston/rng.hpp"

namespace ezheston {

// PPND16 (Wichura, Applied Statistics 37, algorithm AS 241).
double inverse_normal_cdf(double u) {
    if (!(u > 0.0) || !(u < 1.0))
        throw DomainError("normal quantile needs u in (0, 1)");
    double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r +
                      3.3430575583588128105e4) *
                         r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r +
                      2.8729085735721942674e4) *
                         r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double num, den;
    if (r <= 5.0) {
        r -= 1.6;
        num = ((((((7.74545014278341407640e-4 * r +
                    2.27238449892691845833e-2) *
                       r +
                   2.41780725177450611770e-1) *
                      r +
                  1.27045825245236838258e0) *
                     r +
                 3.64784832476320460504e0) *
                    r +
                5.76949722146069140550e0) *
                   r +
               4.63033784615654529590e0) *
                  r +
              1.42343711074968357734e0;
        den = ((((((1.05075007164441684324e-9 * r +
                    5.47593808499534494600e-4) *
                       r +
                   1.51986665636164571966e-2) *
                      r +
                  1.48103976427480074590e-1) *
                     r +
                 6.89767334985100004550e-1) *
                    r +
                1.67638483018380384940e0) *
                   r +
               2.05319162663775882187e0) *
                  r +
              1.0;
    } else {
        r -= 5.0;
        num = ((((((2.01033439929228813265e-7 * r +
                    2.71155556874348757815e-5) *
                       r +
                   1.24266094738807843860e-3) *
                      r +
                  2.65321895265761230930e-2) *
                     r +
                 2.96560571828504891230e-1) *
                    r +
                1.78482653991729133580e0) *
                   r +
               5.46378491116411436990e0) *
                  r +
              6.65790464350110377720e0;
        den = ((((((2.04426310338993978564e-15 * r +
                    1.42151175831644588870e-7) *
                       r +
                   1.84631831751005468180e-5) *
                      r +
                  7.86869131145613259100e-4) *
                     r +
                 1.48753612908506148525e-2) *
                    r +
                1.36929880922735805310e-1) *
                   r +
               5.99832206555887937690e-1) *
                  r +
              1.0;
    }
    double z = num / den;
    return q < 0.0 ? -z : z;
}

int sim_steps(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw ValidationError("n_paths must be at least 1");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw ValidationError("antithetic pairing needs an even n_paths");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(cfg.T_sim > 0.0)) throw ValidationError("T_sim must be positive");
    long long n = std::llround(cfg.T_sim / cfg.dt);
    if (n < 1 || std::abs(n * cfg.dt - cfg.T_sim) >
                     1e-8 * std::max(1.0, cfg.T_sim))
        throw ValidationError("T_sim must be an integer multiple of dt");
    if (n > 50'000'000) throw ValidationError("T_sim/dt is too large");
    return static_cast<int>(n);
}

namespace {

// One pass over all paths. strat(t, nu) is consulted only when with_wealth;
// the variance recursion and draw order are identical either way, which is
// what makes the wealth pass reproduce the base ensemble's paths.
template <typename StratFn>
void run_mc(const MarketParams& m, const SimConfig& cfg, PathEnsemble& ens,
            bool with_wealth, double lx0, StratFn&& strat) {
    if (!(m.nu0 >= 0.0)) throw ValidationError("nu0 must be nonnegative");
    int n = sim_steps(cfg);
    double dt = cfg.dt;
    double sdt = std::sqrt(dt);
    double rho_c = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));

    ens.cfg = cfg;
    ens.t.resize(n + 1);
    for (int k = 0; k <= n; ++k) ens.t[k] = k * dt;
    ens.nu_sum.assign(n + 1, 0.0);
    ens.nu_sum_sq.assign(n + 1, 0.0);
    ens.wealth_attached = with_wealth;
    ens.all_positive = true;
    if (with_wealth) {
        ens.terminal_log_wealth.assign(cfg.n_paths, 0.0);
        ens.c_ratio_min = std::numeric_limits<double>::infinity();
        ens.c_ratio_max = -std::numeric_limits<double>::infinity();
    }
    if (cfg.store_paths) {
        ens.nu.assign(cfg.n_paths, std::vector<double>(n + 1));
        if (with_wealth) {
            ens.log_wealth.assign(cfg.n_paths, std::vector<double>(n + 1));
            ens.c_over_x.assign(cfg.n_paths, std::vector<double>(n + 1));
        }
    }

    for (int j = 0; j < cfg.n_paths; ++j) {
        std::uint64_t stream = cfg.antithetic ? static_cast<std::uint64_t>(j / 2)
                                              : static_cast<std::uint64_t>(j);
        double sign = (cfg.antithetic && (j & 1)) ? -1.0 : 1.0;
        Xoshiro256pp g = substream(cfg.seed, stream);
        double nu_raw = m.nu0;
        double lx = lx0;
        for (int k = 0; k <= n; ++k) {
            double nup = nu_raw > 0.0 ? nu_raw : 0.0;
            ens.nu_sum[k] += nup;
            ens.nu_sum_sq[k] += nup * nup;
            if (cfg.store_paths) ens.nu[j][k] = nup;
            double cox = 0.0, pi = 0.0;
            if (with_wealth) {
                Strategy st = strat(ens.t[k], nup);
                cox = st.c_over_x;
                pi = st.pi;
                ens.c_ratio_min = std::min(ens.c_ratio_min, cox);
                ens.c_ratio_max = std::max(ens.c_ratio_max, cox);
                if (cfg.store_paths) {
                    ens.log_wealth[j][k] = lx;
                    ens.c_over_x[j][k] = cox;
                }
            }
            if (k == n) break;
            double z1 = sign * standard_normal(g);
            double z2 = sign * standard_normal(g);
            if (with_wealth) {
                double drift = m.r + m.xi * nup * pi - cox - 0.5 * pi * pi * nup;
                lx += drift * dt +
                      pi * std::sqrt(nup) * sdt * (m.rho * z1 + rho_c * z2);
            }
            nu_raw += m.kappa * (m.theta - nup) * dt +
                      m.sigma * std::sqrt(nup) * sdt * z1;
        }
        if (with_wealth) {
            ens.terminal_log_wealth[j] = lx;
            if (!std::isfinite(lx)) ens.all_positive = false;
        }
    }
}

void require_base(const PathEnsemble& base) {
    if (base.t.empty())
        throw GridMismatch("wealth needs an ensemble with a time grid");
}

} // namespace

PathEnsemble simulate_heston(const MarketParams& m, const SimConfig& cfg) {
    PathEnsemble ens;
    run_mc(m, cfg, ens, false, 0.0,
           [](double, double) { return Strategy{}; });
    return ens;
}

PathEnsemble simulate_wealth(const MarketParams& m, const PreferenceParams& p,
                             const AffineSolution& sol,
                             const PathEnsemble& base) {
    require_base(base);
    if (!(m.x0 > 0.0)) throw ValidationError("x0 must be positive");
    PathEnsemble ens;
    run_mc(m, base.cfg, ens, true, std::log(m.x0),
           [&](double, double nu) { return strategy_infinite(sol, m, p, nu); });
    return ens;
}

PathEnsemble simulate_wealth(const MarketParams& m, const PreferenceParams& p,
                             const CoefficientPath& path,
                             const PathEnsemble& base) {
    require_base(base);
    if (!(m.x0 > 0.0)) throw ValidationError("x0 must be positive");
    if (base.cfg.T_sim > path.grid.T * (1.0 + 1e-12))
        throw GridMismatch("strategy path ends before the simulation horizon");
    PathEnsemble ens;
    run_mc(m, base.cfg, ens, true, std::log(m.x0), [&](double t, double nu) {
        return strategy_finite(path, m, p, std::min(t, path.grid.T), nu);
    });
    return ens;
}

SimSummary summarize(const PathEnsemble& ens) {
    if (!ens.wealth_attached)
        throw DomainError("summary needs a wealth-attached ensemble");
    SimSummary s;
    int n = ens.cfg.n_paths;
    s.n_paths = n;
    s.std_available = n > 1;
    s.t = ens.t;
    double nan = std::numeric_limits<double>::quiet_NaN();

    s.nu_mean.resize(ens.nu_sum.size());
    s.nu_se.resize(ens.nu_sum.size());
    for (size_t k = 0; k < ens.nu_sum.size(); ++k) {
        double mean = ens.nu_sum[k] / n;
        s.nu_mean[k] = mean;
        if (n > 1) {
            double var = (ens.nu_sum_sq[k] - n * mean * mean) / (n - 1);
            s.nu_se[k] = std::sqrt(std::max(var, 0.0) / n);
        } else {
            s.nu_se[k] = nan;
        }
    }

    double lsum = 0.0, wsum = 0.0;
    for (double l : ens.terminal_log_wealth) {
        lsum += l;
        wsum += std::exp(l);
    }
    s.terminal_log_wealth_mean = lsum / n;
    s.terminal_wealth_mean = wsum / n;
    if (n > 1) {
        double lvar = 0.0, wvar = 0.0;
        for (double l : ens.terminal_log_wealth) {
            double dl = l - s.terminal_log_wealth_mean;
            double dw = std::exp(l) - s.terminal_wealth_mean;
            lvar += dl * dl;
            wvar += dw * dw;
        }
        lvar /= n - 1;
        wvar /= n - 1;
        s.terminal_log_wealth_std = std::sqrt(lvar);
        s.terminal_log_wealth_se = std::sqrt(lvar / n);
        s.terminal_wealth_std = std::sqrt(wvar);
    } else {
        s.terminal_log_wealth_std = nan;
        s.terminal_log_wealth_se = nan;
        s.terminal_wealth_std = nan;
    }
    s.c_ratio_min = ens.c_ratio_min;
    s.c_ratio_max = ens.c_ratio_max;
    s.positive = ens.all_positive;
    return s;
}

void write_paths_csv(std::ostream& os, const PathEnsemble& ens) {
    if (!ens.cfg.store_paths || !ens.wealth_attached)
        throw DomainError("per-path CSV needs store_paths and attached wealth");
    os << "path,t,nu,X,c_over_x\n";
    char buf[160];
    for (size_t j = 0; j < ens.nu.size(); ++j) {
        for (size_t k = 0; k < ens.t.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", j,
                          ens.t[k], ens.nu[j][k], std::exp(ens.log_wealth[j][k]),
                          ens.c_over_x[j][k]);
            os << buf;
        }
    }
}

} // namespace ezheston

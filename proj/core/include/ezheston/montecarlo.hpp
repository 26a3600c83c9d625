#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ezheston/finite.hpp"
#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"

namespace ezheston {

// Monte Carlo run shape. T_sim must be an integer multiple of dt within
// rounding. Antithetic runs pair paths (2j, 2j+1) on mirrored normals, so
// n_paths must be even when the flag is set.
struct SimConfig {
    int n_paths = 1;
    double dt = 0.01;
    double T_sim = 1.0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    bool store_paths = false; // keep dense per-path series (memory heavy)
};

// Number of steps implied by (T_sim, dt); throws ValidationError when the
// config is unusable.
int sim_steps(const SimConfig& cfg);

// Simulated ensemble. Per-node moment accumulators and per-path terminal
// values are always kept; dense series only under cfg.store_paths. Any path
// is regenerable from (cfg.seed, path index) alone.
struct PathEnsemble {
    SimConfig cfg;
    std::string generator = "xoshiro256++";
    std::string scheme = "full-truncation euler";
    std::vector<double> t;

    std::vector<double> nu_sum;    // per node, truncated variance over paths
    std::vector<double> nu_sum_sq;
    std::vector<double> terminal_log_wealth; // per path; wealth pass only
    double c_ratio_min = 0.0;
    double c_ratio_max = 0.0;
    bool wealth_attached = false;
    bool all_positive = true;

    std::vector<std::vector<double>> nu;         // [path][node]
    std::vector<std::vector<double>> log_wealth; // wealth pass only
    std::vector<std::vector<double>> c_over_x;   // wealth pass only
};

// Full-truncation Euler on dnu = kappa (theta - nu) dt + sigma sqrt(nu) dW:
// the raw recursion may go negative, its coefficients and the stored series
// use nu+ = max(nu, 0). Two normals are drawn per step (the second drives
// the orthogonal wealth shock) so a later wealth pass sees identical noise.
PathEnsemble simulate_heston(const MarketParams& m, const SimConfig& cfg);

// Log-Euler wealth under the solver strategy evaluated at (t_k, nu_k):
//   dln X = [r + xi nu pi - c/x - pi^2 nu / 2] dt
//         + pi sqrt(nu) (rho dW_nu + sqrt(1-rho^2) dW_perp),
// positive by construction. Variance paths are regenerated from the base
// ensemble's (seed, path index) substreams, bitwise identical to the base.
PathEnsemble simulate_wealth(const MarketParams& m, const PreferenceParams& p,
                             const AffineSolution& sol,
                             const PathEnsemble& base);
PathEnsemble simulate_wealth(const MarketParams& m, const PreferenceParams& p,
                             const CoefficientPath& path,
                             const PathEnsemble& base);

// std/se fields are NaN with std_available = false when n_paths = 1.
struct SimSummary {
    int n_paths = 0;
    bool std_available = false;
    double terminal_wealth_mean = 0.0;
    double terminal_wealth_std = 0.0;
    double terminal_log_wealth_mean = 0.0;
    double terminal_log_wealth_std = 0.0;
    double terminal_log_wealth_se = 0.0;
    std::vector<double> t;
    std::vector<double> nu_mean; // per node, with standard errors
    std::vector<double> nu_se;
    double c_ratio_min = 0.0;
    double c_ratio_max = 0.0;
    bool positive = false;
};

// Requires a wealth-attached ensemble.
SimSummary summarize(const PathEnsemble& ens);

// Columns path,t,nu,X,c_over_x; needs cfg.store_paths and attached wealth.
void write_paths_csv(std::ostream& os, const PathEnsemble& ens);

} // namespace ezheston

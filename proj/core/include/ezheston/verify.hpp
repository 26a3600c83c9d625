#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ezheston/finite.hpp"
#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"

namespace ezheston {

// Utility flow f(c, J) of consuming c at continuation value J. Requires
// c > 0 and, when gamma != 1, (1-gamma) J > 0; gamma = 1 is supported for
// phi = 1 only, where f = beta (ln c - J).
double aggregator_eval(double c, double J, const PreferenceParams& p);

// Left-hand side of the reduced value equation evaluated at solver output.
// max_rel scales each node's residual by the largest single term entering it.
struct ResidualReport {
    std::string pde_id;
    std::vector<double> grid;      // nu nodes
    std::vector<double> residuals; // finite horizon: worst tau node per nu
    double max_abs = 0.0;
    double max_rel = 0.0;
};

ResidualReport reduced_pde_residual(const AffineSolution& sol,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid);

// exact_form = false checks the linearized equation the solver targets;
// exact_form = true substitutes the true consumption term instead, which
// quantifies the log-linearization error (zero at nu = theta).
ResidualReport reduced_pde_residual(const GeneralSolution& sol,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid,
                                    bool exact_form = false);

// Finite horizon: evaluated across all interior tau nodes of the path.
// A0' (and A1' for the general case) come from 5-point central differences
// of the stored path; the unit-EIS A1' uses the analytic slope derivative.
// exact_form applies to general-EIS paths as above.
ResidualReport reduced_pde_residual(const CoefficientPath& path,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid,
                                    bool exact_form = false);

// Single-node version; tau snaps to the nearest grid node (clamped so the
// difference stencil fits).
double reduced_pde_residual_at(const CoefficientPath& path,
                               const MarketParams& m, const PreferenceParams& p,
                               double tau, double nu, bool exact_form = false);

// Bracketed expression of the dynamic-programming equation at controls
// (c, psi), psi = pi * sqrt(nu). The time-derivative term is omitted: it does
// not depend on the controls. A0/A1 are the exponent coefficients in force at
// the evaluation time.
double hamiltonian(CaseTag tag, double A0, double A1, const MarketParams& m,
                   const PreferenceParams& p, double x, double nu, double c,
                   double psi);

// First-order conditions probed by central differences (relative step 1e-6)
// around the candidate optimum, scaled by the largest Hamiltonian term.
struct FocReport {
    double c = 0.0;
    double psi = 0.0;
    double scale = 0.0;
    double rel_dc = 0.0;
    double rel_dpsi = 0.0;
    double psi_second_diff = 0.0;
    bool concave = false;
    bool pass(double tol = 1e-5) const {
        return rel_dc <= tol && rel_dpsi <= tol && concave;
    }
};

FocReport foc_gradient_check(const AffineSolution& sol, const MarketParams& m,
                             const PreferenceParams& p, double x, double nu);
FocReport foc_gradient_check(const CoefficientPath& path, const MarketParams& m,
                             const PreferenceParams& p, double t, double x,
                             double nu);

// Method-of-lines mesh for the independent finite-horizon solve: n_nu nodes
// on [nu_min, nu_max], n_tau outer time steps to tau = T (each refined
// internally to keep the explicit scheme stable), comparisons captured at
// `checkpoints` evenly spaced times including both ends.
struct OracleMesh {
    double nu_min = 0.005;
    double nu_max = 0.09;
    int n_nu = 61;
    int n_tau = 4000;
    int checkpoints = 11;
};

struct OracleComparison {
    std::vector<double> tau;                      // checkpoint times
    std::vector<double> nu;                       // spatial grid
    std::vector<std::vector<double>> closed_form; // [checkpoint][node]
    std::vector<std::vector<double>> oracle;      // same mesh
    double max_rel_diff = 0.0;                    // interior nodes only
    int interior_begin = 0;
    int interior_end = 0; // half-open
};

// Second-order central differences inside, one-sided second-order stencils at
// the edges (the equation itself extrapolates to the boundary), RK4 in time
// with automatic substepping. The reference exponent path is solved on the
// same n_tau grid. Throws InstabilityDetected if any h <= 0.
OracleComparison pde_oracle_finite_unit(const MarketParams& m,
                                        const PreferenceParams& p,
                                        const OracleMesh& mesh);

// Same machinery on the linearized equation with the time-varying weights
// zeta3(tau), zeta4(tau) frozen from the solver path.
OracleComparison pde_oracle_finite_general(const MarketParams& m,
                                           const PreferenceParams& p,
                                           const OracleMesh& mesh);

// Columns tau,nu,closed_form,oracle,rel_diff.
void write_oracle_csv(std::ostream& os, const OracleComparison& oc);

// Exposure bound that keeps the wealth SDE admissible. The quadratic-in-pi
// form is the operative check; the slope-form inequality is evaluated as
// printed and the note records a disagreement (the two are not equivalent
// for gamma > 1).
struct AdmissibilityReport {
    double pi_form_lhs = 0.0;
    double pi_form_rhs = 0.0;
    bool pi_form_ok = false;
    double a1_form_lhs = 0.0;
    double a1_form_rhs = 0.0;
    bool a1_form_ok = false;
    std::string note;
};

AdmissibilityReport admissibility_check(const AffineSolution& sol,
                                        const MarketParams& m,
                                        const PreferenceParams& p);
// Finite horizon: both forms checked at every tau node; worst case reported.
AdmissibilityReport admissibility_check(const CoefficientPath& path,
                                        const MarketParams& m,
                                        const PreferenceParams& p);

} // namespace ezheston

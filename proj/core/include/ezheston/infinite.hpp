#pragma once

#include <optional>
#include <string>

#include "ezheston/model.hpp"

namespace ezheston {

// Coefficients of the quadratic a1*A1^2 + a2*A1 + a3 = 0 that pins the slope
// of the exponent, kept for audit.
struct QuadraticCoeffs {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double discriminant = 0.0;
};

// Infinite-horizon value exponent: the reduced equation is solved by
// exp-affine ln h = A0 + A1 * nu.
struct AffineSolution {
    CaseTag tag = CaseTag::InfUnit;
    double A0 = 0.0;
    double A1 = 0.0;
    QuadraticCoeffs quad;
    std::string note; // e.g. the xi == 0 degenerate-root case
};

// Log-linearization state for the general-EIS solver: the consumption-to-
// wealth ratio is linearized around its mean log value, zeta2 = exp(E) and
// zeta1 = zeta2 * (1 - E) with E the mean log ratio.
struct LogLinearization {
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    double mean_log_cw = 0.0;
    int iterations = 0;
    double final_residual = 0.0;
};

struct FixedPointOptions {
    double damping = 0.5;
    double tol = 1e-12;
    int max_iter = 500;
    // Point where the mean log consumption-to-wealth ratio is closed;
    // defaults to the stationary mean theta.
    std::optional<double> eval_nu;
};

// Consumption fraction, risky weight and raw exposure psi = pi * sqrt(nu).
struct Strategy {
    double c_over_x = 0.0;
    double pi = 0.0;
    double psi = 0.0;
};

// phi == 1 (gamma == 1 allowed; tag becomes LogUtility). A1 is the
// nonnegative root of the slope quadratic, A0 follows in closed form.
AffineSolution solve_unit_eis(const MarketParams& m, const PreferenceParams& p);

// phi != 1, gamma != 1. Damped fixed point on zeta2; each pass solves the
// slope quadratic (root chosen so that -A1/(1-phi) >= 0) and the intercept.
struct GeneralSolution {
    AffineSolution affine;
    LogLinearization loglin;
};
GeneralSolution solve_general_eis(const MarketParams& m, const PreferenceParams& p,
                                  const FixedPointOptions& opt = {});

Strategy strategy_infinite(const AffineSolution& s, const MarketParams& m,
                           const PreferenceParams& p, double nu);

// gamma != 1: x^(1-gamma)/(1-gamma) * exp(k * (A0 + A1 nu)) with k = 1-gamma
// (unit EIS) or -(1-gamma)/(1-phi). gamma == 1: ln x + A0 + A1 nu.
double value_function_infinite(const AffineSolution& s, const MarketParams& m,
                               const PreferenceParams& p, double x, double nu);

} // namespace ezheston

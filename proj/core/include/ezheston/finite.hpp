#pragma once

#include <iosfwd>
#include <vector>

#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"

namespace ezheston {

// Coefficients of the time-dependent slope equation
//   A1'(tau) = (a1/2) A1^2 - a2 A1 + a3/2,   a4 = sqrt(a2^2 - a1 a3).
struct RiccatiCoeffs {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
};

// Unit-EIS coefficients; throws ComplexA4 when a2^2 - a1 a3 < 0.
RiccatiCoeffs riccati_coeffs_unit(const MarketParams& m, const PreferenceParams& p);

// Closed form of the slope in remaining time tau, written so that large tau
// cannot overflow: A1 = a3 (1-w) / (2 a4 w + (a2+a4)(1-w)), w = exp(-a4 tau).
double riccati_closed_form_A1(const RiccatiCoeffs& rc, double tau);
// Analytic tau-derivative of the closed form (independent of the ODE).
double riccati_closed_form_dA1(const RiccatiCoeffs& rc, double tau);

struct TimeGrid {
    double T = 0.0;
    int n_steps = 1000;
    double dt() const { return T / n_steps; }
};

// Exponent coefficients on a uniform grid in remaining time tau = T - t.
// zeta3/zeta4 are filled for the general-EIS case only.
struct CoefficientPath {
    CaseTag tag = CaseTag::FinUnit;
    TimeGrid grid;
    std::vector<double> tau;
    std::vector<double> A0;
    std::vector<double> A1;
    std::vector<double> zeta3;
    std::vector<double> zeta4;

    // Piecewise-linear evaluation; exact at grid nodes.
    double A0_at(double tau) const;
    double A1_at(double tau) const;
    double zeta3_at(double tau) const;
    double zeta4_at(double tau) const;
};

// phi == 1: slope from the closed form, intercept by composite Simpson
// quadrature of the discounted slope integral. Boundary values A0(0) = ln eps
// and A1(0) = 0 hold exactly.
CoefficientPath solve_unit_eis_finite(const MarketParams& m,
                                      const PreferenceParams& p,
                                      const TimeGrid& grid);

// Independent check of the closed form: classical RK4 on the coupled
// (A0, A1) system forward in tau.
CoefficientPath integrate_riccati(const MarketParams& m, const PreferenceParams& p,
                                  const TimeGrid& grid);

// phi != 1, gamma != 1: coupled RK4 where the linearization weights
// zeta4 = exp(phi ln beta - A0 - A1 theta), zeta3 = zeta4 (1 - ln zeta4)
// are recomputed at every stage. Boundary A0(0) = (phi-1) ln eps, A1(0) = 0.
CoefficientPath solve_general_eis_finite(const MarketParams& m,
                                         const PreferenceParams& p,
                                         const TimeGrid& grid);

// Strategy at calendar time t in [0, T].
Strategy strategy_finite(const CoefficientPath& path, const MarketParams& m,
                         const PreferenceParams& p, double t, double nu);

double value_function_finite(const CoefficientPath& path, const MarketParams& m,
                             const PreferenceParams& p, double t, double x,
                             double nu);

// Columns tau,A0,A1,zeta3,zeta4 with a header row; zeta columns are left
// empty for unit-EIS paths.
void write_path_csv(std::ostream& os, const CoefficientPath& path);

} // namespace ezheston

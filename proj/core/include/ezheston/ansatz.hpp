#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ezheston/model.hpp"

namespace ezheston {

// Which reduced equation the exponent ansatz is substituted into.
enum class PdeCase { InfUnit, InfGeneral, FinUnit, FinGeneral };

// Degrees (and coefficients, lowest power first) of the four data functions
// of the state that enter the reduced equation: eta(nu)^2, the state drift
// m1(nu), the cross term eta(nu)*m2(nu) and the squared diffusion m2(nu)^2.
// Trailing zeros are ignored for degree purposes.
struct DegreeSpec {
    std::vector<double> eta_sq;
    std::vector<double> m1;
    std::vector<double> eta_m2;
    std::vector<double> m2_sq;

    int degree_eta_sq() const;
    int degree_m1() const;
    int degree_eta_m2() const;
    int degree_m2_sq() const; // -1 for an identically zero list

    // Structural conditions under which an exponential-polynomial exponent of
    // order 0 / 1 / 2 closes the matching system.
    bool supports_constant_exponent() const;  // eta_sq constant
    bool supports_linear_exponent() const;    // all four degrees <= 1
    bool supports_quadratic_exponent() const; // <=2, <=1, <=1, m2_sq constant
};

// The candidate exponent: ln h = A0 + sum_{k=1..order} (A_k / k) nu^k.
struct AnsatzSpec {
    int order = 1;
    PdeCase pde = PdeCase::InfUnit;
};

// One monomial of a per-power coefficient: an exact rational coefficient
// (as "p/q" or integer string) times symbol^power factors. Symbols are the
// unknowns A0..An, their time derivatives dA0..dAn, and the opaque data
// constants r, beta, ln_beta, zeta1..zeta4.
struct Term {
    std::string coeff;
    std::vector<std::pair<std::string, int>> factors;
};

struct CoeffEquation {
    int power = 0;
    std::vector<Term> terms;
    std::string text;
};

// Substitutes the ansatz into the chosen reduced equation and collects the
// coefficient of each power of nu. Arithmetic is exact: double inputs are
// converted to their exact binary rational values, so "identically zero" is
// decidable without tolerances.
std::vector<CoeffEquation> expand_matching_system(const DegreeSpec& d,
                                                  const AnsatzSpec& a,
                                                  double gamma, double rho,
                                                  double phi);

enum class Verdict { Solvable, Unsolvable, Indeterminate };

const char* to_string(Verdict v);

struct MatchReport {
    Verdict verdict = Verdict::Indeterminate;
    // Powers of nu whose equations contain no unknown to the first power and
    // therefore cannot be satisfied by any admissible coefficient choice.
    std::vector<int> residual_powers;
    std::string witness_text;
    // When the obstruction is the quadratic gradient bracket: the value of
    // rho^2 that the bracket would need, namely gamma/(gamma-1). NaN otherwise.
    double required_rho_sq = 0.0;
    int matched_system_size = 0;
    std::vector<std::string> equations;
};

// Decides whether the order-n ansatz closes the system. Indeterminate is
// reported when a degree exceeds the supported envelope (eta_sq <= 2,
// m1 <= 1, eta_m2 <= 1, m2_sq <= 1), where no structural conclusion is
// drawn. Requires gamma > 0, gamma != 1, |rho| <= 1, order >= 0, and
// phi != 1 for the general-EIS templates.
MatchReport judge_solvability(const DegreeSpec& d, const AnsatzSpec& a,
                              double gamma, double rho, double phi);

// True when the bracket condition rho^2 = gamma/(gamma-1) has no admissible
// correlation, i.e. gamma/(gamma-1) lies outside [0, 1]. That is the case
// for every gamma > 0, gamma != 1.
bool witness_infeasible(double gamma);

// Degree spec of the square-root variance market: eta^2 = xi^2 nu,
// m1 = kappa theta - kappa nu, eta m2 = xi sigma nu, m2^2 = sigma^2 nu.
DegreeSpec heston_degrees(const MarketParams& m);

} // namespace ezheston

#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "ezheston/errors.hpp"

namespace ezheston {

enum class Horizon { Infinite, Finite };

// Market with one risky asset whose variance nu follows a square-root process:
//   dnu = kappa (theta - nu) dt + sigma sqrt(nu) dW^nu
// and whose excess return per unit variance is xi (market price of variance risk).
struct MarketParams {
    double r = 0.0;      // risk-free rate
    double xi = 0.0;     // risk premium factor, excess drift = xi * nu
    double kappa = 0.0;  // variance mean-reversion speed
    double theta = 0.0;  // long-run variance level
    double sigma = 0.0;  // volatility of variance
    double rho = 0.0;    // correlation between asset and variance shocks
    double nu0 = 0.0;    // initial variance
    double x0 = 1.0;     // initial wealth

    double feller_ratio() const { return 2.0 * kappa * theta / (sigma * sigma); }

    // Coefficient functions of the state process, as functions of nu.
    double eta(double nu) const { return xi * std::sqrt(nu); }   // market price of risk
    double m1(double nu) const { return kappa * (theta - nu); }  // state drift
    double m2(double nu) const { return sigma * std::sqrt(nu); } // state diffusion
};

// Recursive preferences with relative risk aversion gamma and elasticity of
// intertemporal substitution phi; beta is the rate of time preference.
// epsilon weighs terminal wealth on a finite horizon.
struct PreferenceParams {
    double beta = 0.0;
    double gamma = 0.0;
    double phi = 0.0;
    double epsilon = 1.0;
    Horizon horizon = Horizon::Infinite;
    double T = 0.0; // horizon length in years, finite only

    bool unit_eis() const { return phi == 1.0; }
    bool unit_gamma() const { return gamma == 1.0; }
};

enum class CaseTag { InfUnit, InfGeneral, FinUnit, FinGeneral, LogUtility };

const char* to_string(CaseTag tag);

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

ValidationReport validate_market(const MarketParams& m);
ValidationReport validate_preferences(const PreferenceParams& p);

// Returns 1..4 for the parameter region that makes the recursive utility
// well-posed when both gamma != 1 and phi != 1, or 0 if (gamma, phi) lies in
// none of them:
//  1: gamma>1, phi>1   2: gamma>1, phi<1, gamma*phi<=1
//  3: gamma<1, phi<1   4: gamma<1, phi>1, gamma*phi>=1
int wellposed_region(double gamma, double phi);

// Deterministic dispatch on (horizon, phi==1, gamma==1). Throws
// InvalidPreferences for combinations no solver covers (gamma==1, phi!=1).
CaseTag classify_case(const MarketParams& m, const PreferenceParams& p);

struct Instance {
    MarketParams market;
    PreferenceParams prefs;
};

// Flat key=value config. Keys: r, xi, kappa, theta, sigma, rho, nu0, x0,
// beta, gamma, phi, epsilon, horizon ("inf" or a positive number of years).
// xi additionally accepts fractions like "7/15". '#' starts a comment.
// Unknown or missing keys throw ConfigError; no validation is applied here.
Instance parse_config(std::istream& in);
Instance load_config(const std::string& path);

// "0.25" or "7/15" -> double. Throws ConfigError on anything else.
double parse_decimal_or_fraction(const std::string& text);

} // namespace ezheston

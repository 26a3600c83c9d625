#include "ezheston/finite.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ezheston {

namespace {

double slope_bracket(const MarketParams& m, double gamma) {
    double g1 = 1.0 - gamma;
    return g1 + m.rho * m.rho * g1 * g1 / gamma;
}

void require_valid(const MarketParams& m, const PreferenceParams& p) {
    auto mrep = validate_market(m);
    auto prep = validate_preferences(p);
    if (!mrep.ok())
        throw ValidationError("market rejected: " + mrep.errors.front());
    if (!prep.ok())
        throw InvalidPreferences("preferences rejected: " + prep.errors.front());
    if (p.horizon != Horizon::Finite)
        throw InvalidPreferences("finite-horizon solver requires a finite horizon");
}

void require_grid(const TimeGrid& g) {
    if (!(g.T > 0.0) || g.n_steps < 1)
        throw DomainError("time grid needs T > 0 and n_steps >= 1");
}

double interp(const CoefficientPath& p, const std::vector<double>& y, double tau) {
    if (y.empty()) throw DomainError("coefficient series not present on this path");
    double T = p.grid.T;
    if (tau < 0.0 || tau > T * (1.0 + 1e-12))
        throw DomainError("tau outside [0, T]");
    tau = std::min(tau, T);
    double dt = p.grid.dt();
    int i = std::min(static_cast<int>(tau / dt), p.grid.n_steps - 1);
    double w = (tau - p.tau[i]) / dt;
    return y[i] + w * (y[i + 1] - y[i]);
}

} // namespace

double CoefficientPath::A0_at(double t) const { return interp(*this, A0, t); }
double CoefficientPath::A1_at(double t) const { return interp(*this, A1, t); }
double CoefficientPath::zeta3_at(double t) const { return interp(*this, zeta3, t); }
double CoefficientPath::zeta4_at(double t) const { return interp(*this, zeta4, t); }

RiccatiCoeffs riccati_coeffs_unit(const MarketParams& m, const PreferenceParams& p) {
    RiccatiCoeffs rc;
    rc.a1 = m.sigma * m.sigma * slope_bracket(m, p.gamma);
    rc.a2 = p.beta + m.kappa - m.xi * m.rho * m.sigma * (1.0 - p.gamma) / p.gamma;
    rc.a3 = m.xi * m.xi / p.gamma;
    double disc = rc.a2 * rc.a2 - rc.a1 * rc.a3;
    if (disc < 0.0) {
        std::ostringstream os;
        os << "a2^2 - a1*a3 = " << disc << " < 0, slope closed form is complex";
        throw ComplexA4(os.str());
    }
    rc.a4 = std::sqrt(disc);
    return rc;
}

double riccati_closed_form_A1(const RiccatiCoeffs& rc, double tau) {
    if (rc.a4 == 0.0) return rc.a3 * tau / (2.0 + rc.a2 * tau);
    double w = std::exp(-rc.a4 * tau);
    double one_minus_w = -std::expm1(-rc.a4 * tau);
    return rc.a3 * one_minus_w / (2.0 * rc.a4 * w + (rc.a2 + rc.a4) * one_minus_w);
}

double riccati_closed_form_dA1(const RiccatiCoeffs& rc, double tau) {
    if (rc.a4 == 0.0) {
        double d = 2.0 + rc.a2 * tau;
        return 2.0 * rc.a3 / (d * d);
    }
    double w = std::exp(-rc.a4 * tau);
    double one_minus_w = -std::expm1(-rc.a4 * tau);
    double num = rc.a3 * one_minus_w;
    double den = 2.0 * rc.a4 * w + (rc.a2 + rc.a4) * one_minus_w;
    double dnum = rc.a3 * rc.a4 * w;
    double dden = rc.a4 * w * (rc.a2 - rc.a4);
    return (dnum * den - num * dden) / (den * den);
}

CoefficientPath solve_unit_eis_finite(const MarketParams& m,
                                      const PreferenceParams& p,
                                      const TimeGrid& grid) {
    require_valid(m, p);
    require_grid(grid);
    if (p.phi != 1.0)
        throw InvalidPreferences("unit-EIS solver requires phi = 1");

    RiccatiCoeffs rc = riccati_coeffs_unit(m, p);

    CoefficientPath path;
    path.tag = (p.gamma == 1.0) ? CaseTag::LogUtility : CaseTag::FinUnit;
    path.grid = grid;
    int n = grid.n_steps;
    double dt = grid.dt();
    path.tau.resize(n + 1);
    path.A0.resize(n + 1);
    path.A1.resize(n + 1);

    double log_eps = std::log(p.epsilon);
    double beta = p.beta;
    double const_level = m.r / beta - 1.0 + std::log(beta);

    // J(tau) = integral of A1(s) e^{beta s} ds, advanced one interval at a
    // time with Simpson using the closed-form midpoint value.
    double J = 0.0;
    auto f = [&](double s) { return riccati_closed_form_A1(rc, s) * std::exp(beta * s); };
    for (int i = 0; i <= n; ++i) {
        double tau = i * dt;
        path.tau[i] = tau;
        path.A1[i] = riccati_closed_form_A1(rc, tau);
        if (i > 0) {
            double lo = (i - 1) * dt;
            J += dt / 6.0 * (f(lo) + 4.0 * f(lo + 0.5 * dt) + f(tau));
        }
        double damp = std::exp(-beta * tau);
        path.A0[i] = log_eps * damp - const_level * std::expm1(-beta * tau) +
                     m.kappa * m.theta * damp * J;
    }
    return path;
}

namespace {

template <typename Deriv, typename State>
void rk4_march(Deriv&& deriv, State& y, double dt) {
    State k1 = deriv(y);
    State k2 = deriv({y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]});
    State k3 = deriv({y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]});
    State k4 = deriv({y[0] + dt * k3[0], y[1] + dt * k3[1]});
    y[0] += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
}

void check_state(double A0, double A1, double tau) {
    if (!std::isfinite(A0) || !std::isfinite(A1) || std::abs(A1) > 1e6) {
        std::ostringstream os;
        os << "integration blew up near tau = " << tau << " (A0 = " << A0
           << ", A1 = " << A1 << ")";
        throw StepRejected(os.str());
    }
}

} // namespace

CoefficientPath integrate_riccati(const MarketParams& m, const PreferenceParams& p,
                                  const TimeGrid& grid) {
    require_valid(m, p);
    require_grid(grid);
    if (p.phi != 1.0)
        throw InvalidPreferences("unit-EIS solver requires phi = 1");

    RiccatiCoeffs rc = riccati_coeffs_unit(m, p);
    double beta = p.beta;
    double rhs_const = m.r - beta + beta * std::log(beta);

    using State = std::array<double, 2>; // (A0, A1)
    auto deriv = [&](const State& y) -> State {
        return {rhs_const + m.kappa * m.theta * y[1] - beta * y[0],
                0.5 * rc.a1 * y[1] * y[1] - rc.a2 * y[1] + 0.5 * rc.a3};
    };

    CoefficientPath path;
    path.tag = (p.gamma == 1.0) ? CaseTag::LogUtility : CaseTag::FinUnit;
    path.grid = grid;
    int n = grid.n_steps;
    double dt = grid.dt();
    path.tau.resize(n + 1);
    path.A0.resize(n + 1);
    path.A1.resize(n + 1);

    State y = {std::log(p.epsilon), 0.0};
    for (int i = 0; i <= n; ++i) {
        path.tau[i] = i * dt;
        path.A0[i] = y[0];
        path.A1[i] = y[1];
        if (i < n) {
            rk4_march(deriv, y, dt);
            check_state(y[0], y[1], (i + 1) * dt);
        }
    }
    return path;
}

CoefficientPath solve_general_eis_finite(const MarketParams& m,
                                         const PreferenceParams& p,
                                         const TimeGrid& grid) {
    require_valid(m, p);
    require_grid(grid);
    if (p.phi == 1.0 || p.gamma == 1.0)
        throw InvalidPreferences("general-EIS solver requires phi != 1 and gamma != 1");

    const double phi = p.phi, beta = p.beta, gamma = p.gamma;
    const double log_beta = std::log(beta);
    const double hedging = m.xi * m.rho * m.sigma * (1.0 - gamma) / gamma;
    const double a1 = m.sigma * m.sigma * slope_bracket(m, gamma) / (phi - 1.0);
    const double a3 = m.xi * m.xi * (phi - 1.0) / gamma;

    auto zeta4_of = [&](double A0, double A1) {
        return std::exp(phi * log_beta - A0 - A1 * m.theta);
    };
    auto zeta3_of = [&](double A0, double A1) {
        double mlog = phi * log_beta - A0 - A1 * m.theta;
        return std::exp(mlog) * (1.0 - mlog);
    };

    using State = std::array<double, 2>;
    auto deriv = [&](const State& y) -> State {
        double z4 = zeta4_of(y[0], y[1]);
        double z3 = zeta3_of(y[0], y[1]);
        double a2 = z4 + m.kappa - hedging;
        double dA0 = m.r * (phi - 1.0) + z3 + z4 * phi * log_beta - beta * phi +
                     m.kappa * m.theta * y[1] - z4 * y[0];
        double dA1 = 0.5 * a1 * y[1] * y[1] - a2 * y[1] + 0.5 * a3;
        return {dA0, dA1};
    };

    CoefficientPath path;
    path.tag = CaseTag::FinGeneral;
    path.grid = grid;
    int n = grid.n_steps;
    double dt = grid.dt();
    path.tau.resize(n + 1);
    path.A0.resize(n + 1);
    path.A1.resize(n + 1);
    path.zeta3.resize(n + 1);
    path.zeta4.resize(n + 1);

    State y = {(phi - 1.0) * std::log(p.epsilon), 0.0};
    for (int i = 0; i <= n; ++i) {
        path.tau[i] = i * dt;
        path.A0[i] = y[0];
        path.A1[i] = y[1];
        path.zeta3[i] = zeta3_of(y[0], y[1]);
        path.zeta4[i] = zeta4_of(y[0], y[1]);
        if (i < n) {
            rk4_march(deriv, y, dt);
            check_state(y[0], y[1], (i + 1) * dt);
        }
    }
    return path;
}

Strategy strategy_finite(const CoefficientPath& path, const MarketParams& m,
                         const PreferenceParams& p, double t, double nu) {
    if (!(nu >= 0.0)) throw DomainError("nu must be nonnegative");
    if (t < 0.0 || t > path.grid.T) throw DomainError("t outside [0, T]");
    double tau = path.grid.T - t;
    Strategy st;
    switch (path.tag) {
        case CaseTag::FinUnit:
        case CaseTag::LogUtility:
            st.c_over_x = p.beta;
            st.pi = m.xi / p.gamma +
                    m.rho * m.sigma * (1.0 - p.gamma) * path.A1_at(tau) / p.gamma;
            break;
        case CaseTag::FinGeneral:
            st.c_over_x = std::exp(p.phi * std::log(p.beta) - path.A0_at(tau) -
                                   path.A1_at(tau) * nu);
            st.pi = m.xi / p.gamma -
                    m.rho * m.sigma * (1.0 - p.gamma) *
                        (path.A1_at(tau) / (1.0 - p.phi)) / p.gamma;
            break;
        default:
            throw DomainError("strategy_finite needs a finite-horizon path");
    }
    st.psi = st.pi * std::sqrt(nu);
    return st;
}

double value_function_finite(const CoefficientPath& path, const MarketParams&,
                             const PreferenceParams& p, double t, double x,
                             double nu) {
    if (!(x > 0.0)) throw DomainError("wealth must be positive");
    if (!(nu >= 0.0)) throw DomainError("nu must be nonnegative");
    if (t < 0.0 || t > path.grid.T) throw DomainError("t outside [0, T]");
    double tau = path.grid.T - t;
    double expo = path.A0_at(tau) + path.A1_at(tau) * nu;
    if (path.tag == CaseTag::LogUtility) return std::log(x) + expo;
    double g1 = 1.0 - p.gamma;
    double k = (path.tag == CaseTag::FinUnit) ? g1 : -g1 / (1.0 - p.phi);
    return std::pow(x, g1) / g1 * std::exp(k * expo);
}

void write_path_csv(std::ostream& os, const CoefficientPath& path) {
    os << "tau,A0,A1,zeta3,zeta4\n";
    char buf[128];
    bool general = !path.zeta3.empty();
    for (size_t i = 0; i < path.tau.size(); ++i) {
        if (general) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          path.tau[i], path.A0[i], path.A1[i], path.zeta3[i],
                          path.zeta4[i]);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,,\n", path.tau[i],
                          path.A0[i], path.A1[i]);
        }
        os << buf;
    }
}

} // namespace ezheston

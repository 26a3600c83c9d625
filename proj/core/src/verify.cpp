#include "ezheston/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace ezheston {

namespace {

struct TermSum {
    double sum = 0.0;
    double scale = 0.0;
    void add(double t) {
        sum += t;
        scale = std::max(scale, std::abs(t));
    }
};

// m1 + (eta/gamma) rho m2 (1-gamma), the drift the exponent slope multiplies.
double advection(const MarketParams& m, double gamma, double nu) {
    return m.m1(nu) + m.rho * m.sigma * m.xi * nu * (1.0 - gamma) / gamma;
}

TermSum unit_terms(const MarketParams& m, const PreferenceParams& p, double A0,
                   double A1, double nu, bool finite, double dA0, double dA1) {
    double g = p.gamma;
    double g1 = 1.0 - g;
    double P = A0 + A1 * nu;
    double eta2 = m.xi * m.xi * nu;
    double m2sq = m.sigma * m.sigma * nu;
    TermSum t;
    if (finite) t.add(-(dA0 + dA1 * nu));
    t.add(m.r);
    t.add(-p.beta);
    t.add(eta2 / (2.0 * g));
    t.add(p.beta * (std::log(p.beta) - P));
    t.add(advection(m, g, nu) * A1);
    t.add(0.5 * m2sq * (m.rho * m.rho * g1 * g1 / g - g) * A1 * A1);
    t.add(0.5 * m2sq * A1 * A1); // h_nunu / h for an affine exponent
    return t;
}

TermSum general_terms(const MarketParams& m, const PreferenceParams& p,
                      double A0, double A1, double z_lin, double z_slope,
                      double nu, bool exact_form, bool finite, double dA0,
                      double dA1) {
    double g = p.gamma, phi = p.phi;
    double g1 = 1.0 - g;
    double q1 = 1.0 / (1.0 - phi);
    double P = A0 + A1 * nu;
    double eta2 = m.xi * m.xi * nu;
    double m2sq = m.sigma * m.sigma * nu;
    double log_beta = std::log(p.beta);
    // Consumption-to-wealth ratio: true value or its linearization in ln h.
    double cw = exact_form ? std::exp(phi * log_beta - P)
                           : z_lin + z_slope * (phi * log_beta - P);
    TermSum t;
    if (finite) t.add(q1 * (dA0 + dA1 * nu));
    t.add(m.r);
    t.add(-cw);
    t.add(eta2 / (2.0 * g));
    t.add(p.beta * phi / (phi - 1.0) * (cw / p.beta - 1.0));
    t.add(-q1 * advection(m, g, nu) * A1);
    t.add(0.5 * q1 * q1 * m2sq *
          (2.0 - phi - g + m.rho * m.rho * g1 * g1 / g) * A1 * A1);
    t.add(-0.5 * q1 * m2sq * A1 * A1);
    return t;
}

void require_nu_grid(const std::vector<double>& nu_grid) {
    if (nu_grid.empty()) throw DomainError("empty nu grid");
    for (double v : nu_grid)
        if (!(v > 0.0)) throw DomainError("nu grid must be positive");
}

ResidualReport finish_report(ResidualReport rep) {
    for (double r : rep.residuals) rep.max_abs = std::max(rep.max_abs, std::abs(r));
    return rep;
}

} // namespace

double aggregator_eval(double c, double J, const PreferenceParams& p) {
    if (!(c > 0.0)) throw DomainError("aggregator requires c > 0");
    double g = p.gamma, phi = p.phi, beta = p.beta;
    if (g == 1.0) {
        if (phi != 1.0)
            throw DomainError("aggregator with gamma = 1 requires phi = 1");
        return beta * (std::log(c) - J);
    }
    double gJ = (1.0 - g) * J;
    if (!(gJ > 0.0)) throw DomainError("aggregator requires (1-gamma) J > 0");
    if (phi == 1.0)
        return beta * gJ * (std::log(c) - std::log(gJ) / (1.0 - g));
    double ce = std::pow(gJ, 1.0 / (1.0 - g));
    double e = 1.0 - 1.0 / phi;
    return beta / e * gJ * (std::pow(c / ce, e) - 1.0);
}

ResidualReport reduced_pde_residual(const AffineSolution& sol,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid) {
    require_nu_grid(nu_grid);
    if (sol.tag != CaseTag::InfUnit && sol.tag != CaseTag::LogUtility)
        throw DomainError("affine residual overload covers unit-EIS infinite "
                          "solutions; use the general or finite overloads");
    ResidualReport rep;
    rep.pde_id = to_string(sol.tag);
    rep.grid = nu_grid;
    for (double nu : nu_grid) {
        TermSum t = unit_terms(m, p, sol.A0, sol.A1, nu, false, 0.0, 0.0);
        rep.residuals.push_back(t.sum);
        if (t.scale > 0.0)
            rep.max_rel = std::max(rep.max_rel, std::abs(t.sum) / t.scale);
    }
    return finish_report(std::move(rep));
}

ResidualReport reduced_pde_residual(const GeneralSolution& sol,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid,
                                    bool exact_form) {
    require_nu_grid(nu_grid);
    ResidualReport rep;
    rep.pde_id = std::string(to_string(sol.affine.tag)) +
                 (exact_form ? " exact" : " linearized");
    rep.grid = nu_grid;
    for (double nu : nu_grid) {
        TermSum t = general_terms(m, p, sol.affine.A0, sol.affine.A1,
                                  sol.loglin.zeta1, sol.loglin.zeta2, nu,
                                  exact_form, false, 0.0, 0.0);
        rep.residuals.push_back(t.sum);
        if (t.scale > 0.0)
            rep.max_rel = std::max(rep.max_rel, std::abs(t.sum) / t.scale);
    }
    return finish_report(std::move(rep));
}

namespace {

// 5-point central difference on the stored path; i must lie in [2, n-2].
double fd5(const std::vector<double>& y, int i, double dt) {
    return (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * dt);
}

TermSum path_node_terms(const CoefficientPath& path, const MarketParams& m,
                        const PreferenceParams& p, int i, double nu,
                        bool exact_form, const RiccatiCoeffs* rc) {
    double dt = path.grid.dt();
    double dA0 = fd5(path.A0, i, dt);
    if (path.tag == CaseTag::FinGeneral) {
        double dA1 = fd5(path.A1, i, dt);
        return general_terms(m, p, path.A0[i], path.A1[i], path.zeta3[i],
                             path.zeta4[i], nu, exact_form, true, dA0, dA1);
    }
    double dA1 = rc ? riccati_closed_form_dA1(*rc, path.tau[i])
                    : fd5(path.A1, i, dt);
    return unit_terms(m, p, path.A0[i], path.A1[i], nu, true, dA0, dA1);
}

void require_path(const CoefficientPath& path) {
    if (path.grid.n_steps < 4)
        throw DomainError("path too short for the residual stencil");
    if (path.tag != CaseTag::FinUnit && path.tag != CaseTag::FinGeneral &&
        path.tag != CaseTag::LogUtility)
        throw DomainError("path residual needs a finite-horizon path");
}

} // namespace

ResidualReport reduced_pde_residual(const CoefficientPath& path,
                                    const MarketParams& m,
                                    const PreferenceParams& p,
                                    const std::vector<double>& nu_grid,
                                    bool exact_form) {
    require_nu_grid(nu_grid);
    require_path(path);
    RiccatiCoeffs rc;
    bool unit = path.tag != CaseTag::FinGeneral;
    if (unit) rc = riccati_coeffs_unit(m, p);

    ResidualReport rep;
    rep.pde_id = to_string(path.tag);
    if (path.tag == CaseTag::FinGeneral)
        rep.pde_id += exact_form ? " exact" : " linearized";
    rep.grid = nu_grid;
    rep.residuals.assign(nu_grid.size(), 0.0);
    int n = path.grid.n_steps;
    for (int i = 2; i <= n - 2; ++i) {
        for (size_t j = 0; j < nu_grid.size(); ++j) {
            TermSum t = path_node_terms(path, m, p, i, nu_grid[j], exact_form,
                                        unit ? &rc : nullptr);
            if (std::abs(t.sum) > std::abs(rep.residuals[j]))
                rep.residuals[j] = t.sum;
            if (t.scale > 0.0)
                rep.max_rel = std::max(rep.max_rel, std::abs(t.sum) / t.scale);
        }
    }
    return finish_report(std::move(rep));
}

double reduced_pde_residual_at(const CoefficientPath& path,
                               const MarketParams& m, const PreferenceParams& p,
                               double tau, double nu, bool exact_form) {
    if (!(nu > 0.0)) throw DomainError("nu must be positive");
    require_path(path);
    RiccatiCoeffs rc;
    bool unit = path.tag != CaseTag::FinGeneral;
    if (unit) rc = riccati_coeffs_unit(m, p);
    int n = path.grid.n_steps;
    int i = static_cast<int>(std::lround(tau / path.grid.dt()));
    i = std::clamp(i, 2, n - 2);
    return path_node_terms(path, m, p, i, nu, exact_form, unit ? &rc : nullptr)
        .sum;
}

namespace {

struct ValueDerivs {
    double w, wx, wxx, wnu, wnunu, wxnu;
};

ValueDerivs value_derivs(CaseTag tag, double A0, double A1,
                         const PreferenceParams& p, double x, double nu) {
    ValueDerivs d{};
    double E = A0 + A1 * nu;
    if (tag == CaseTag::LogUtility) {
        d.w = std::log(x) + E;
        d.wx = 1.0 / x;
        d.wxx = -1.0 / (x * x);
        d.wnu = A1;
        d.wnunu = 0.0;
        d.wxnu = 0.0;
        return d;
    }
    double g1 = 1.0 - p.gamma;
    bool unit = tag == CaseTag::InfUnit || tag == CaseTag::FinUnit;
    double k = unit ? g1 : -g1 / (1.0 - p.phi);
    double ek = std::exp(k * E);
    double xg = std::pow(x, g1);
    d.w = xg / g1 * ek;
    d.wx = xg / x * ek;
    d.wxx = -p.gamma * xg / (x * x) * ek;
    d.wnu = k * A1 * d.w;
    d.wnunu = k * A1 * k * A1 * d.w;
    d.wxnu = k * A1 * d.wx;
    return d;
}

TermSum hamiltonian_terms(CaseTag tag, double A0, double A1,
                          const MarketParams& m, const PreferenceParams& p,
                          double x, double nu, double c, double psi) {
    ValueDerivs d = value_derivs(tag, A0, A1, p, x, nu);
    double eta = m.eta(nu);
    double m2v = m.m2(nu);
    TermSum t;
    t.add((m.r + psi * eta) * x * d.wx);
    t.add(-c * d.wx);
    t.add(0.5 * psi * psi * x * x * d.wxx);
    t.add(m.m1(nu) * d.wnu);
    t.add(0.5 * m2v * m2v * d.wnunu);
    t.add(x * psi * m.rho * m2v * d.wxnu);
    t.add(aggregator_eval(c, d.w, p));
    return t;
}

FocReport foc_impl(CaseTag tag, double A0, double A1, const MarketParams& m,
                   const PreferenceParams& p, double x, double nu, double c,
                   double psi) {
    if (!(x > 0.0) || !(nu > 0.0))
        throw DomainError("foc check needs x > 0 and nu > 0");
    auto H = [&](double cc, double pp) {
        if (!(cc > 0.0))
            throw DomainError("perturbed consumption left (0, inf)");
        return hamiltonian_terms(tag, A0, A1, m, p, x, nu, cc, pp);
    };
    FocReport r;
    r.c = c;
    r.psi = psi;
    TermSum at = H(c, psi);
    r.scale = at.scale > 0.0 ? at.scale : 1.0;
    double dc = 1e-6 * c;
    double dpsi = 1e-6 * std::max(std::abs(psi), 1.0);
    double gc = (H(c + dc, psi).sum - H(c - dc, psi).sum) / (2.0 * dc);
    double gp = (H(c, psi + dpsi).sum - H(c, psi - dpsi).sum) / (2.0 * dpsi);
    r.rel_dc = std::abs(gc) * c / r.scale;
    r.rel_dpsi = std::abs(gp) * std::max(std::abs(psi), 1.0) / r.scale;
    // Wider step for the curvature probe; H is exactly quadratic in psi.
    double dp2 = 1e-3 * std::max(std::abs(psi), 1.0);
    r.psi_second_diff =
        (H(c, psi + dp2).sum - 2.0 * at.sum + H(c, psi - dp2).sum) / (dp2 * dp2);
    r.concave = r.psi_second_diff < 0.0;
    return r;
}

} // namespace

double hamiltonian(CaseTag tag, double A0, double A1, const MarketParams& m,
                   const PreferenceParams& p, double x, double nu, double c,
                   double psi) {
    if (!(x > 0.0) || !(nu > 0.0))
        throw DomainError("hamiltonian needs x > 0 and nu > 0");
    return hamiltonian_terms(tag, A0, A1, m, p, x, nu, c, psi).sum;
}

FocReport foc_gradient_check(const AffineSolution& sol, const MarketParams& m,
                             const PreferenceParams& p, double x, double nu) {
    Strategy st = strategy_infinite(sol, m, p, nu);
    return foc_impl(sol.tag, sol.A0, sol.A1, m, p, x, nu, st.c_over_x * x,
                    st.psi);
}

FocReport foc_gradient_check(const CoefficientPath& path, const MarketParams& m,
                             const PreferenceParams& p, double t, double x,
                             double nu) {
    Strategy st = strategy_finite(path, m, p, t, nu);
    double tau = path.grid.T - t;
    return foc_impl(path.tag, path.A0_at(tau), path.A1_at(tau), m, p, x, nu,
                    st.c_over_x * x, st.psi);
}

namespace {

// Second-order first and second differences; one-sided at the edges.
void differentiate(const std::vector<double>& h, double dnu,
                   std::vector<double>& d1, std::vector<double>& d2) {
    size_t n = h.size();
    for (size_t i = 1; i + 1 < n; ++i) {
        d1[i] = (h[i + 1] - h[i - 1]) / (2.0 * dnu);
        d2[i] = (h[i + 1] - 2.0 * h[i] + h[i - 1]) / (dnu * dnu);
    }
    d1[0] = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * dnu);
    d1[n - 1] = (3.0 * h[n - 1] - 4.0 * h[n - 2] + h[n - 3]) / (2.0 * dnu);
    d2[0] = (2.0 * h[0] - 5.0 * h[1] + 4.0 * h[2] - h[3]) / (dnu * dnu);
    d2[n - 1] =
        (2.0 * h[n - 1] - 5.0 * h[n - 2] + 4.0 * h[n - 3] - h[n - 4]) /
        (dnu * dnu);
}

void require_alive(const std::vector<double>& h, double tau) {
    for (double v : h) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "oracle state left (0, inf) near tau = " << tau;
            throw InstabilityDetected(os.str());
        }
    }
}

// Explicit RK4 march of h_tau = F(tau, h) with per-step substepping chosen
// from a spectral-radius estimate of the discrete operator.
template <typename Rhs, typename Bound>
OracleComparison run_mol(const PreferenceParams& p, const OracleMesh& mesh,
                         const CoefficientPath& path, Rhs&& rhs,
                         Bound&& bound) {
    if (mesh.n_nu < 8) throw DomainError("oracle mesh needs at least 8 nodes");
    if (!(mesh.nu_min > 0.0) || !(mesh.nu_max > mesh.nu_min))
        throw DomainError("oracle mesh needs 0 < nu_min < nu_max");
    if (mesh.n_tau < 1 || mesh.checkpoints < 2 || mesh.checkpoints > mesh.n_tau + 1)
        throw DomainError("oracle mesh needs n_tau >= 1 and 2 <= checkpoints <= n_tau + 1");

    int n = mesh.n_nu;
    double dnu = (mesh.nu_max - mesh.nu_min) / (n - 1);
    double dtau = p.T / mesh.n_tau;

    OracleComparison oc;
    oc.nu.resize(n);
    for (int i = 0; i < n; ++i) oc.nu[i] = mesh.nu_min + i * dnu;
    oc.interior_begin = n / 3;
    oc.interior_end = n - n / 3;

    std::vector<double> h(n), d1(n), d2(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int i = 0; i < n; ++i)
        h[i] = std::exp(path.A0_at(0.0) + path.A1_at(0.0) * oc.nu[i]);

    auto f = [&](double tau, const std::vector<double>& hh,
                 std::vector<double>& out) {
        require_alive(hh, tau);
        differentiate(hh, dnu, d1, d2);
        rhs(tau, hh, d1, d2, out);
    };

    auto record = [&](double tau) {
        oc.tau.push_back(tau);
        oc.closed_form.emplace_back(n);
        oc.oracle.push_back(h);
        auto& cf = oc.closed_form.back();
        for (int i = 0; i < n; ++i) {
            cf[i] = std::exp(path.A0_at(tau) + path.A1_at(tau) * oc.nu[i]);
            if (i >= oc.interior_begin && i < oc.interior_end)
                oc.max_rel_diff = std::max(
                    oc.max_rel_diff, std::abs(h[i] - cf[i]) / std::abs(cf[i]));
        }
    };

    record(0.0);
    int next_cp = 1;
    for (int k = 0; k < mesh.n_tau; ++k) {
        double tau_k = k * dtau;
        double lambda = bound(h);
        int nsub = std::max(1, static_cast<int>(std::ceil(dtau * lambda / 1.25)));
        if (nsub > 200000)
            throw InstabilityDetected("stability substepping exploded");
        double dt = dtau / nsub;
        for (int s = 0; s < nsub; ++s) {
            double t0 = tau_k + s * dt;
            f(t0, h, k1);
            for (int i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k1[i];
            f(t0 + 0.5 * dt, tmp, k2);
            for (int i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k2[i];
            f(t0 + 0.5 * dt, tmp, k3);
            for (int i = 0; i < n; ++i) tmp[i] = h[i] + dt * k3[i];
            f(t0 + dt, tmp, k4);
            for (int i = 0; i < n; ++i)
                h[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        require_alive(h, (k + 1) * dtau);
        long long want = std::llround(
            static_cast<double>(next_cp) * mesh.n_tau / (mesh.checkpoints - 1));
        if (next_cp < mesh.checkpoints && k + 1 >= want) {
            record((k + 1) * dtau);
            ++next_cp;
        }
    }
    return oc;
}

} // namespace

OracleComparison pde_oracle_finite_unit(const MarketParams& m,
                                        const PreferenceParams& p,
                                        const OracleMesh& mesh) {
    CoefficientPath path =
        solve_unit_eis_finite(m, p, TimeGrid{p.T, mesh.n_tau});
    double g = p.gamma;
    double g1 = 1.0 - g;
    double log_beta = std::log(p.beta);
    double nl = m.rho * m.rho * g1 * g1 / g - g; // h_nu^2/h coefficient scale

    auto rhs = [&](double, const std::vector<double>& h,
                   const std::vector<double>& d1, const std::vector<double>& d2,
                   std::vector<double>& out) {
        for (size_t i = 0; i < h.size(); ++i) {
            double nu = mesh.nu_min +
                        i * (mesh.nu_max - mesh.nu_min) / (mesh.n_nu - 1);
            double m2sq = m.sigma * m.sigma * nu;
            double react = m.r - p.beta + 0.5 * m.xi * m.xi * nu / g +
                           p.beta * (log_beta - std::log(h[i]));
            out[i] = react * h[i] + advection(m, g, nu) * d1[i] +
                     0.5 * m2sq * nl * d1[i] * d1[i] / h[i] +
                     0.5 * m2sq * d2[i];
        }
    };
    auto bound = [&](const std::vector<double>& h) {
        double dnu = (mesh.nu_max - mesh.nu_min) / (mesh.n_nu - 1);
        std::vector<double> d1(h.size()), d2(h.size());
        differentiate(h, dnu, d1, d2);
        double dmax = 0.5 * m.sigma * m.sigma * mesh.nu_max;
        double amax = 0.0, rmax = 0.0;
        for (size_t i = 0; i < h.size(); ++i) {
            double nu = mesh.nu_min + i * dnu;
            double m2sq = m.sigma * m.sigma * nu;
            double grad = d1[i] / h[i];
            amax = std::max(amax, std::abs(advection(m, g, nu) +
                                           m2sq * nl * grad));
            rmax = std::max(rmax,
                            std::abs(m.r - p.beta + 0.5 * m.xi * m.xi * nu / g +
                                     p.beta * (log_beta - std::log(h[i]))) +
                                p.beta +
                                0.5 * m2sq * std::abs(nl) * grad * grad);
        }
        return 12.0 * dmax / (dnu * dnu) + 4.0 * amax / dnu + rmax;
    };
    return run_mol(p, mesh, path, rhs, bound);
}

OracleComparison pde_oracle_finite_general(const MarketParams& m,
                                           const PreferenceParams& p,
                                           const OracleMesh& mesh) {
    CoefficientPath path =
        solve_general_eis_finite(m, p, TimeGrid{p.T, mesh.n_tau});
    double g = p.gamma, phi = p.phi;
    double g1 = 1.0 - g;
    double log_beta = std::log(p.beta);
    double bigb = 2.0 - phi - g + m.rho * m.rho * g1 * g1 / g;

    auto rhs = [&](double tau, const std::vector<double>& h,
                   const std::vector<double>& d1, const std::vector<double>& d2,
                   std::vector<double>& out) {
        double z3 = path.zeta3_at(tau);
        double z4 = path.zeta4_at(tau);
        for (size_t i = 0; i < h.size(); ++i) {
            double nu = mesh.nu_min +
                        i * (mesh.nu_max - mesh.nu_min) / (mesh.n_nu - 1);
            double m2sq = m.sigma * m.sigma * nu;
            double L = z3 + z4 * (phi * log_beta - std::log(h[i]));
            double react = -(1.0 - phi) * (m.r + 0.5 * m.xi * m.xi * nu / g) -
                           phi * p.beta + L;
            out[i] = react * h[i] + advection(m, g, nu) * d1[i] -
                     0.5 * m2sq * bigb / (1.0 - phi) * d1[i] * d1[i] / h[i] +
                     0.5 * m2sq * d2[i];
        }
    };
    auto bound = [&](const std::vector<double>& h) {
        double dnu = (mesh.nu_max - mesh.nu_min) / (mesh.n_nu - 1);
        std::vector<double> d1(h.size()), d2(h.size());
        differentiate(h, dnu, d1, d2);
        double dmax = 0.5 * m.sigma * m.sigma * mesh.nu_max;
        double z3 = 0.0, z4 = 0.0;
        for (double z : path.zeta3) z3 = std::max(z3, std::abs(z));
        for (double z : path.zeta4) z4 = std::max(z4, z);
        double amax = 0.0, rmax = 0.0;
        for (size_t i = 0; i < h.size(); ++i) {
            double nu = mesh.nu_min + i * dnu;
            double m2sq = m.sigma * m.sigma * nu;
            double grad = d1[i] / h[i];
            double quasi = advection(m, g, nu) -
                           m2sq * bigb / (1.0 - phi) * grad;
            amax = std::max(amax, std::abs(quasi));
            double react =
                std::abs(1.0 - phi) * (std::abs(m.r) + 0.5 * m.xi * m.xi * nu / g) +
                std::abs(phi) * p.beta + z3 +
                z4 * (1.0 + std::abs(phi * log_beta - std::log(h[i]))) +
                0.5 * m2sq * std::abs(bigb / (1.0 - phi)) * grad * grad;
            rmax = std::max(rmax, react);
        }
        return 12.0 * dmax / (dnu * dnu) + 4.0 * amax / dnu + rmax;
    };
    return run_mol(p, mesh, path, rhs, bound);
}

void write_oracle_csv(std::ostream& os, const OracleComparison& oc) {
    os << "tau,nu,closed_form,oracle,rel_diff\n";
    char buf[160];
    for (size_t c = 0; c < oc.tau.size(); ++c) {
        for (size_t i = 0; i < oc.nu.size(); ++i) {
            double cf = oc.closed_form[c][i];
            double ov = oc.oracle[c][i];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          oc.tau[c], oc.nu[i], cf, ov,
                          std::abs(ov - cf) / std::abs(cf));
            os << buf;
        }
    }
}

namespace {

double pi_form_lhs_at(double gamma, double xi, double pi) {
    double g1 = 1.0 - gamma;
    return 2.0 * g1 * xi * pi - g1 * pi * pi + 2.0 * g1 * g1 * pi * pi;
}

double a1_form_lhs_at(const MarketParams& m, double gamma, double u) {
    double g1 = 1.0 - gamma;
    return (1.0 - 2.0 * gamma) * m.rho * m.rho * m.sigma * m.sigma * g1 * g1 *
               u * u +
           2.0 * m.xi * m.rho * m.sigma * g1 * g1 * u + m.xi * m.xi;
}

AdmissibilityReport admissibility_core(const MarketParams& m,
                                       const PreferenceParams& p,
                                       const std::vector<double>& pis,
                                       const std::vector<double>& slopes) {
    AdmissibilityReport rep;
    rep.pi_form_rhs = m.kappa * m.kappa / (2.0 * m.sigma * m.sigma);
    rep.a1_form_rhs = m.kappa * m.kappa * p.gamma * p.gamma /
                      (2.0 * (1.0 - p.gamma) * m.sigma * m.sigma);
    rep.pi_form_lhs = -std::numeric_limits<double>::infinity();
    rep.a1_form_lhs = -std::numeric_limits<double>::infinity();
    for (double pi : pis)
        rep.pi_form_lhs =
            std::max(rep.pi_form_lhs, pi_form_lhs_at(p.gamma, m.xi, pi));
    for (double u : slopes)
        rep.a1_form_lhs = std::max(rep.a1_form_lhs, a1_form_lhs_at(m, p.gamma, u));
    rep.pi_form_ok = rep.pi_form_lhs <= rep.pi_form_rhs;
    rep.a1_form_ok = rep.a1_form_lhs <= rep.a1_form_rhs;
    std::ostringstream note;
    if (p.gamma == 1.0) {
        rep.a1_form_ok = true;
        note << "slope-form bound degenerates at gamma = 1; ";
    } else if (rep.pi_form_ok != rep.a1_form_ok) {
        note << "the two bounds disagree; the exposure-form verdict is "
                "operative; ";
    }
    rep.note = note.str();
    if (!rep.note.empty()) rep.note.resize(rep.note.size() - 2);
    return rep;
}

} // namespace

AdmissibilityReport admissibility_check(const AffineSolution& sol,
                                        const MarketParams& m,
                                        const PreferenceParams& p) {
    Strategy st = strategy_infinite(sol, m, p, m.theta);
    double u = (sol.tag == CaseTag::InfGeneral) ? -sol.A1 / (1.0 - p.phi)
                                                : sol.A1;
    return admissibility_core(m, p, {st.pi}, {u});
}

AdmissibilityReport admissibility_check(const CoefficientPath& path,
                                        const MarketParams& m,
                                        const PreferenceParams& p) {
    bool general = path.tag == CaseTag::FinGeneral;
    std::vector<double> pis, slopes;
    pis.reserve(path.A1.size());
    slopes.reserve(path.A1.size());
    for (double a1 : path.A1) {
        double u = general ? -a1 / (1.0 - p.phi) : a1;
        slopes.push_back(u);
        pis.push_back(m.xi / p.gamma +
                      m.rho * m.sigma * (1.0 - p.gamma) * u / p.gamma);
    }
    return admissibility_core(m, p, pis, slopes);
}

} // namespace ezheston

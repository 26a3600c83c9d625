#include "ezheston/infinite.hpp"

#include <cmath>
#include <sstream>

#include "ezheston/numerics.hpp"

namespace ezheston {

namespace {

// Common bracket 1 - gamma + rho^2 (1-gamma)^2 / gamma.
double slope_bracket(const MarketParams& m, double gamma) {
    double g1 = 1.0 - gamma;
    return g1 + m.rho * m.rho * g1 * g1 / gamma;
}

// Solve a1 u^2 + a2 u + a3 = 0 and return the nonnegative root; with two
// nonnegative roots the smaller one is taken (it is the branch continuous in
// gamma across 1). u is the normalized slope, equal to A1 for unit EIS and
// to -A1/(1-phi) otherwise.
double nonnegative_root(const QuadraticCoeffs& q, std::string* note) {
    auto roots = stable_quadratic_roots(q.a1, q.a2, q.a3);
    if (!roots) throw NoRealRoot("slope quadratic has no real root");
    double lo = std::min(roots->first, roots->second);
    double hi = std::max(roots->first, roots->second);
    double u;
    if (lo >= 0.0) u = lo;
    else if (hi >= 0.0) u = hi;
    else throw NoAdmissibleRoot("both slope roots are negative");
    if (u == 0.0 && note)
        *note = "slope root is exactly 0 (xi = 0): no hedging demand";
    return u;
}

void require_valid(const MarketParams& m, const PreferenceParams& p) {
    auto mrep = validate_market(m);
    auto prep = validate_preferences(p);
    if (!mrep.ok())
        throw ValidationError("market rejected: " + mrep.errors.front());
    if (!prep.ok())
        throw InvalidPreferences("preferences rejected: " + prep.errors.front());
}

} // namespace

AffineSolution solve_unit_eis(const MarketParams& m, const PreferenceParams& p) {
    require_valid(m, p);
    if (p.phi != 1.0)
        throw InvalidPreferences("unit-EIS solver requires phi = 1");

    AffineSolution s;
    s.tag = (p.gamma == 1.0) ? CaseTag::LogUtility : CaseTag::InfUnit;
    s.quad.a1 = 0.5 * m.sigma * m.sigma * slope_bracket(m, p.gamma);
    s.quad.a2 = m.xi * m.rho * m.sigma * (1.0 - p.gamma) / p.gamma - p.beta - m.kappa;
    s.quad.a3 = m.xi * m.xi / (2.0 * p.gamma);
    s.quad.discriminant = s.quad.a2 * s.quad.a2 - 4.0 * s.quad.a1 * s.quad.a3;
    s.A1 = nonnegative_root(s.quad, &s.note);
    s.A0 = std::log(p.beta) - 1.0 + (m.r + m.kappa * m.theta * s.A1) / p.beta;
    return s;
}

GeneralSolution solve_general_eis(const MarketParams& m, const PreferenceParams& p,
                                  const FixedPointOptions& opt) {
    require_valid(m, p);
    if (p.phi == 1.0 || p.gamma == 1.0)
        throw InvalidPreferences("general-EIS solver requires phi != 1 and gamma != 1");

    const double phi = p.phi, beta = p.beta, gamma = p.gamma;
    const double nu_eval = opt.eval_nu.value_or(m.theta);
    const double hedging = m.xi * m.rho * m.sigma * (1.0 - gamma) / gamma;
    const double log_beta = std::log(beta);

    GeneralSolution out;
    AffineSolution& s = out.affine;
    s.tag = CaseTag::InfGeneral;

    // Fixed point on z = zeta2. Start from the phi -> 1 limit where the
    // consumption fraction is beta.
    double z = beta;
    double A0 = 0.0, A1 = 0.0, zeta1 = 0.0, mean = 0.0, resid = 0.0;
    int it = 0;
    for (it = 1; it <= opt.max_iter; ++it) {
        // Normalized slope u = -A1/(1-phi) solves the unit-EIS quadratic with
        // beta replaced by z.
        QuadraticCoeffs q;
        q.a1 = 0.5 * m.sigma * m.sigma * slope_bracket(m, gamma);
        q.a2 = hedging - z - m.kappa;
        q.a3 = m.xi * m.xi / (2.0 * gamma);
        q.discriminant = q.a2 * q.a2 - 4.0 * q.a1 * q.a3;
        double u = nonnegative_root(q, &s.note);
        A1 = -(1.0 - phi) * u;
        s.quad = q;

        zeta1 = z * (1.0 - std::log(z));
        A0 = phi * log_beta +
             (m.r * (phi - 1.0) + zeta1 - beta * phi + m.kappa * m.theta * A1) / z;

        mean = phi * log_beta - A0 - A1 * nu_eval;
        double z_next = std::exp(mean);
        resid = std::abs(z - z_next);
        if (resid <= opt.tol) break;
        z = (1.0 - opt.damping) * z + opt.damping * z_next;
        if (!(z > 0.0) || !std::isfinite(z))
            throw NonConvergence("fixed point left the positive domain");
    }
    if (resid > opt.tol) {
        std::ostringstream os;
        os << "fixed point missed tolerance " << opt.tol << " after "
           << opt.max_iter << " iterations (residual " << resid << ")";
        throw NonConvergence(os.str());
    }

    s.A0 = A0;
    s.A1 = A1;
    out.loglin.zeta1 = zeta1;
    out.loglin.zeta2 = z;
    out.loglin.mean_log_cw = mean;
    out.loglin.iterations = it;
    out.loglin.final_residual = resid;
    return out;
}

Strategy strategy_infinite(const AffineSolution& s, const MarketParams& m,
                           const PreferenceParams& p, double nu) {
    if (!(nu >= 0.0)) throw DomainError("nu must be nonnegative");
    Strategy st;
    switch (s.tag) {
        case CaseTag::InfUnit:
        case CaseTag::LogUtility:
            st.c_over_x = p.beta;
            st.pi = m.xi / p.gamma +
                    m.rho * m.sigma * (1.0 - p.gamma) * s.A1 / p.gamma;
            break;
        case CaseTag::InfGeneral:
            st.c_over_x = std::exp(p.phi * std::log(p.beta) - s.A0 - s.A1 * nu);
            st.pi = m.xi / p.gamma - m.rho * m.sigma * (1.0 - p.gamma) *
                                         (s.A1 / (1.0 - p.phi)) / p.gamma;
            break;
        default:
            throw DomainError("strategy_infinite needs an infinite-horizon solution");
    }
    st.psi = st.pi * std::sqrt(nu);
    return st;
}

double value_function_infinite(const AffineSolution& s, const MarketParams&,
                               const PreferenceParams& p, double x, double nu) {
    if (!(x > 0.0)) throw DomainError("wealth must be positive");
    if (!(nu >= 0.0)) throw DomainError("nu must be nonnegative");
    double expo = s.A0 + s.A1 * nu;
    if (s.tag == CaseTag::LogUtility) return std::log(x) + expo;
    double g1 = 1.0 - p.gamma;
    double k = (s.tag == CaseTag::InfUnit) ? g1 : -g1 / (1.0 - p.phi);
    return std::pow(x, g1) / g1 * std::exp(k * expo);
}

} // namespace ezheston

#include "ezheston/ansatz.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace ezheston {

namespace {

// Symbol ids: unknowns first so that map ordering puts A/dA factors ahead of
// the opaque data symbols in rendered monomials.
constexpr int SYM_DA_BASE = 1000;
constexpr int SYM_OPAQUE = 2000;
constexpr int SYM_R = 2000;
constexpr int SYM_BETA = 2001;
constexpr int SYM_LNBETA = 2002;
constexpr int SYM_ZETA1 = 2003; // zeta2..zeta4 follow

int sym_A(int k) { return k; }
int sym_dA(int k) { return SYM_DA_BASE + k; }
int sym_zeta(int i) { return SYM_ZETA1 + (i - 1); }

bool is_unknown(int id) { return id < SYM_OPAQUE; }

std::string symbol_name(int id) {
    if (id < SYM_DA_BASE) return "A" + std::to_string(id);
    if (id < SYM_OPAQUE) return "dA" + std::to_string(id - SYM_DA_BASE);
    switch (id) {
        case SYM_R: return "r";
        case SYM_BETA: return "beta";
        case SYM_LNBETA: return "ln_beta";
        default: return "zeta" + std::to_string(id - SYM_ZETA1 + 1);
    }
}

// A monomial: sorted (symbol id, exponent), exponents >= 1.
using Mono = std::vector<std::pair<int, int>>;

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono out;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

int unknown_degree(const Mono& m) {
    int d = 0;
    for (const auto& [id, e] : m)
        if (is_unknown(id)) d += e;
    return d;
}

struct Poly {
    std::map<Mono, mpq_class> t;

    bool zero() const { return t.empty(); }

    void add(const Mono& m, const mpq_class& c) {
        if (c == 0) return;
        auto [it, inserted] = t.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) t.erase(it);
        }
    }

    static Poly constant(const mpq_class& c) {
        Poly p;
        p.add({}, c);
        return p;
    }
    static Poly symbol(int id) {
        Poly p;
        p.add({{id, 1}}, 1);
        return p;
    }
};

Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b.t) out.add(m, c);
    return out;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.t)
        for (const auto& [mb, cb] : b.t) out.add(mono_mul(ma, mb), ca * cb);
    return out;
}

Poly scale(const Poly& a, const mpq_class& c) {
    Poly out;
    if (c == 0) return out;
    for (const auto& [m, k] : a.t) out.add(m, k * c);
    return out;
}

// Polynomial in nu whose coefficients are Polys in the symbols.
using Series = std::vector<Poly>;

void add_into(Series& acc, const Series& s, const mpq_class& c) {
    if (s.size() > acc.size()) acc.resize(s.size());
    for (size_t i = 0; i < s.size(); ++i) acc[i] = acc[i] + scale(s[i], c);
}

Series mul(const Series& a, const Series& b) {
    if (a.empty() || b.empty()) return {};
    Series out(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
    return out;
}

Series scale_poly(const Series& a, const Poly& p) {
    Series out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * p;
    return out;
}

mpq_class exact(double x) {
    if (!std::isfinite(x))
        throw DomainError("non-finite value in degree spec or parameter");
    return mpq_class(x); // exact binary-rational conversion
}

Series data_series(const std::vector<double>& v) {
    Series s(v.size());
    for (size_t i = 0; i < v.size(); ++i) s[i] = Poly::constant(exact(v[i]));
    return s;
}

int degree_of(const std::vector<double>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i)
        if (v[i] != 0.0) return i;
    return -1;
}

std::string render_mono(const Mono& m) {
    std::string s;
    for (const auto& [id, e] : m) {
        s += " " + symbol_name(id);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

std::string render_poly(const Poly& p) {
    if (p.zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : p.t) {
        mpq_class a = c;
        if (first) {
            if (a < 0) {
                s += "-";
                a = -a;
            }
        } else {
            s += (a < 0) ? " - " : " + ";
            if (a < 0) a = -a;
        }
        s += a.get_str() + render_mono(m);
        first = false;
    }
    return s;
}

bool is_general(PdeCase c) {
    return c == PdeCase::InfGeneral || c == PdeCase::FinGeneral;
}
bool is_finite(PdeCase c) {
    return c == PdeCase::FinUnit || c == PdeCase::FinGeneral;
}

// Substitution of ln h = A0 + sum (A_k/k) nu^k into the reduced equation,
// divided through by h. Every contribution is linear in the unknowns except
// the squared-gradient term, whose nu^j coefficients carry the bracket
// 1 - gamma + rho^2 (1-gamma)^2 / gamma.
Series assemble(const DegreeSpec& d, const AnsatzSpec& a, const mpq_class& g,
                const mpq_class& rho, const mpq_class& phi) {
    const int n = a.order;
    const mpq_class one = 1;

    Series P(n + 1);
    P[0] = Poly::symbol(sym_A(0));
    for (int k = 1; k <= n; ++k) P[k] = scale(Poly::symbol(sym_A(k)), one / k);

    Series Pp(std::max(n, 1));
    for (int k = 1; k <= n; ++k) Pp[k - 1] = Poly::symbol(sym_A(k));

    Series Ppp(std::max(n - 1, 1));
    for (int k = 2; k <= n; ++k)
        Ppp[k - 2] = scale(Poly::symbol(sym_A(k)), mpq_class(k - 1));

    Series eta_sq = data_series(d.eta_sq);
    Series drift = data_series(d.m1);
    Series cross = data_series(d.eta_m2);
    Series diff_sq = data_series(d.m2_sq);

    const mpq_class g1 = 1 - g;
    const mpq_class bracket = g1 + rho * rho * g1 * g1 / g;
    const mpq_class rho_fac = rho * g1 / g;

    // m1 + rho (1-gamma)/gamma * eta m2, the advection of the exponent.
    Series adv = drift;
    add_into(adv, cross, rho_fac);

    Series E;
    add_into(E, eta_sq, one / (2 * g));

    if (!is_general(a.pde)) {
        // constant: r - beta + beta ln beta
        Series c0(1);
        c0[0].add({{SYM_R, 1}}, 1);
        c0[0].add({{SYM_BETA, 1}}, -1);
        c0[0].add({{SYM_BETA, 1}, {SYM_LNBETA, 1}}, 1);
        add_into(E, c0, one);
        add_into(E, scale_poly(P, Poly::symbol(SYM_BETA)), -one);
        add_into(E, mul(adv, Pp), one);
        add_into(E, mul(diff_sq, Ppp), one / 2);
        add_into(E, mul(diff_sq, mul(Pp, Pp)), bracket / 2);
        if (is_finite(a.pde)) {
            Series D(n + 1);
            D[0] = Poly::symbol(sym_dA(0));
            for (int k = 1; k <= n; ++k)
                D[k] = scale(Poly::symbol(sym_dA(k)), one / k);
            add_into(E, D, -one);
        }
    } else {
        if (phi == 1) throw DomainError("general-EIS template requires phi != 1");
        const mpq_class q1 = one / (1 - phi);
        const int zc = (a.pde == PdeCase::InfGeneral) ? 1 : 3;
        // constant: r + beta phi/(1-phi) - (zeta_odd + zeta_even phi ln beta)/(1-phi)
        Series c0(1);
        c0[0].add({{SYM_R, 1}}, 1);
        c0[0].add({{SYM_BETA, 1}}, phi * q1);
        c0[0].add({{sym_zeta(zc), 1}}, -q1);
        c0[0].add({{SYM_LNBETA, 1}, {sym_zeta(zc + 1), 1}}, -phi * q1);
        add_into(E, c0, one);
        add_into(E, scale_poly(P, Poly::symbol(sym_zeta(zc + 1))), q1);
        add_into(E, mul(adv, Pp), -q1);
        add_into(E, mul(diff_sq, Ppp), -q1 / 2);
        add_into(E, mul(diff_sq, mul(Pp, Pp)), bracket * q1 * q1 / 2);
        if (is_finite(a.pde)) {
            Series D(n + 1);
            D[0] = Poly::symbol(sym_dA(0));
            for (int k = 1; k <= n; ++k)
                D[k] = scale(Poly::symbol(sym_dA(k)), one / k);
            add_into(E, D, q1);
        }
    }

    while (!E.empty() && E.back().zero()) E.pop_back();
    return E;
}

void validate_inputs(const AnsatzSpec& a, double gamma, double rho, double phi) {
    if (a.order < 0) throw DomainError("ansatz order must be >= 0");
    if (!(gamma > 0.0) || gamma == 1.0)
        throw DomainError("matching analysis requires gamma > 0, gamma != 1");
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("rho out of [-1,1]");
    if (is_general(a.pde) && phi == 1.0)
        throw DomainError("general-EIS template requires phi != 1");
}

} // namespace

int DegreeSpec::degree_eta_sq() const { return degree_of(eta_sq); }
int DegreeSpec::degree_m1() const { return degree_of(m1); }
int DegreeSpec::degree_eta_m2() const { return degree_of(eta_m2); }
int DegreeSpec::degree_m2_sq() const { return degree_of(m2_sq); }

bool DegreeSpec::supports_constant_exponent() const { return degree_eta_sq() <= 0; }

bool DegreeSpec::supports_linear_exponent() const {
    return degree_eta_sq() <= 1 && degree_m1() <= 1 && degree_eta_m2() <= 1 &&
           degree_m2_sq() <= 1;
}

bool DegreeSpec::supports_quadratic_exponent() const {
    return degree_eta_sq() <= 2 && degree_m1() <= 1 && degree_eta_m2() <= 1 &&
           degree_m2_sq() <= 0;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Solvable: return "Solvable";
        case Verdict::Unsolvable: return "Unsolvable";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::vector<CoeffEquation> expand_matching_system(const DegreeSpec& d,
                                                  const AnsatzSpec& a,
                                                  double gamma, double rho,
                                                  double phi) {
    validate_inputs(a, gamma, rho, phi);
    Series E = assemble(d, a, exact(gamma), exact(rho), exact(phi));

    std::vector<CoeffEquation> eqs(E.size());
    for (size_t j = 0; j < E.size(); ++j) {
        eqs[j].power = static_cast<int>(j);
        eqs[j].text = render_poly(E[j]);
        for (const auto& [m, c] : E[j].t) {
            Term t;
            t.coeff = c.get_str();
            for (const auto& [id, e] : m) t.factors.emplace_back(symbol_name(id), e);
            eqs[j].terms.push_back(std::move(t));
        }
    }
    return eqs;
}

MatchReport judge_solvability(const DegreeSpec& d, const AnsatzSpec& a,
                              double gamma, double rho, double phi) {
    validate_inputs(a, gamma, rho, phi);

    MatchReport rep;
    rep.required_rho_sq = std::numeric_limits<double>::quiet_NaN();

    const bool in_envelope = d.degree_eta_sq() <= 2 && d.degree_m1() <= 1 &&
                             d.degree_eta_m2() <= 1 && d.degree_m2_sq() <= 1;

    const mpq_class g = exact(gamma), rq = exact(rho), pq = exact(phi);
    Series E = assemble(d, a, g, rq, pq);
    for (size_t j = 0; j < E.size(); ++j) {
        CoeffEquation eq;
        eq.power = static_cast<int>(j);
        rep.equations.push_back("nu^" + std::to_string(j) + ": " + render_poly(E[j]));
    }

    if (!in_envelope) {
        rep.verdict = Verdict::Indeterminate;
        rep.witness_text =
            "degree envelope exceeded (supported: eta_sq <= 2, m1 <= 1, "
            "eta_m2 <= 1, m2_sq <= 1); no structural verdict for these data "
            "functions";
        return rep;
    }

    int consumable = 0;
    bool quad_obstruction = false;
    bool data_obstruction = false;
    for (size_t j = 0; j < E.size(); ++j) {
        if (E[j].zero()) continue;
        bool pivot = false;
        for (const auto& [m, c] : E[j].t)
            if (unknown_degree(m) == 1) pivot = true;
        if (pivot) {
            ++consumable;
            continue;
        }
        rep.residual_powers.push_back(static_cast<int>(j));
        for (const auto& [m, c] : E[j].t) {
            if (unknown_degree(m) >= 2) quad_obstruction = true;
            if (unknown_degree(m) == 0) data_obstruction = true;
        }
    }
    rep.matched_system_size = consumable;

    if (rep.residual_powers.empty()) {
        rep.verdict = Verdict::Solvable;
        return rep;
    }

    rep.verdict = Verdict::Unsolvable;
    std::ostringstream os;
    if (quad_obstruction) {
        mpq_class req = g / (g - 1);
        rep.required_rho_sq = req.get_d();
        os << "matching nu^" << rep.residual_powers.front()
           << " requires the squared-gradient bracket 1 - gamma + "
              "rho^2 (1-gamma)^2 / gamma to vanish, i.e. rho^2 = "
              "gamma/(gamma-1) = "
           << req.get_d() << "; no correlation in [-1,1] attains this";
    }
    if (data_obstruction) {
        if (quad_obstruction) os << "; additionally ";
        os << "a data term of the state equation has no matching unknown at ";
        bool first = true;
        for (int p : rep.residual_powers) {
            bool has_const = false;
            for (const auto& [m, c] : E[p].t)
                if (unknown_degree(m) == 0) has_const = true;
            if (has_const) {
                os << (first ? "nu^" : ", nu^") << p;
                first = false;
            }
        }
    }
    rep.witness_text = os.str();
    return rep;
}

bool witness_infeasible(double gamma) {
    if (!(gamma > 0.0) || gamma == 1.0)
        throw DomainError("witness condition requires gamma > 0, gamma != 1");
    double q = gamma / (gamma - 1.0);
    return q < 0.0 || q > 1.0;
}

DegreeSpec heston_degrees(const MarketParams& m) {
    DegreeSpec d;
    d.eta_sq = {0.0, m.xi * m.xi};
    d.m1 = {m.kappa * m.theta, -m.kappa};
    d.eta_m2 = {0.0, m.xi * m.sigma};
    d.m2_sq = {0.0, m.sigma * m.sigma};
    return d;
}

} // namespace ezheston

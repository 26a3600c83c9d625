#include "ezheston/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ezheston/finite.hpp"
#include "ezheston/infinite.hpp"

namespace ezheston {

const char* to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::Nu: return "nu";
    case SweepAxis::Time: return "t";
    case SweepAxis::Gamma: return "gamma";
    }
    return "?";
}

namespace {

bool finite_case(CaseTag tag) {
    return tag == CaseTag::FinUnit || tag == CaseTag::FinGeneral;
}

bool unit_case(CaseTag tag) {
    return tag == CaseTag::InfUnit || tag == CaseTag::FinUnit;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + i * (hi - lo) / (n - 1);
    return v;
}

template <typename E>
[[noreturn]] void rethrow_with_gamma(const E& e, double gamma) {
    std::ostringstream os;
    os << "gamma = " << gamma << ": " << e.what();
    throw E(os.str());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void validate_spec(const SweepSpec& spec, const MarketParams& m,
                   const PreferenceParams& p) {
    if (spec.axis_count < 1)
        throw ValidationError("axis grid must be nonempty");
    if (spec.axis_count > 1 && !(spec.axis_min < spec.axis_max))
        throw ValidationError("axis grid must be strictly increasing");
    if (spec.case_tag == CaseTag::LogUtility)
        throw ValidationError("sweeps cover the four ansatz cases only");
    if (spec.axis == SweepAxis::Gamma) {
        if (!(spec.axis_min > 1.0))
            throw ValidationError("gamma axis must stay above 1");
    } else {
        if (spec.gamma_set.empty())
            throw ValidationError("gamma set must be nonempty");
        auto sorted = spec.gamma_set;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("gamma set must not repeat values");
        if (!(sorted.front() > 1.0))
            throw ValidationError("gamma set values must exceed 1");
    }
    if (spec.axis == SweepAxis::Nu && !(spec.axis_min > 0.0))
        throw ValidationError("nu axis must be positive");
    if (spec.axis == SweepAxis::Time) {
        if (!finite_case(spec.case_tag))
            throw ValidationError("time axis needs a finite-horizon case");
        if (spec.axis_min < 0.0 || spec.axis_max > p.T)
            throw ValidationError("time axis must lie within [0, T]");
    }
    if (finite_case(spec.case_tag)) {
        if (!(p.T > 0.0))
            throw ValidationError("finite-horizon sweeps need T > 0");
        if (spec.n_steps < 4)
            throw ValidationError("n_steps too small for a finite solve");
        if (spec.fixed_t < 0.0 || spec.fixed_t > p.T)
            throw ValidationError("fixed_t must lie within [0, T]");
    }
    if (unit_case(spec.case_tag) && p.phi != 1.0)
        throw ValidationError("unit-EIS sweeps need phi = 1");
    if (!unit_case(spec.case_tag) && p.phi == 1.0)
        throw ValidationError("general-EIS sweeps need phi != 1");
    (void)m;
}

} // namespace

SweepTable run_sweep(const SweepSpec& spec, const MarketParams& m,
                     const PreferenceParams& p) {
    validate_spec(spec, m, p);
    SweepTable table;
    table.spec = spec;

    std::vector<double> axis =
        linspace(spec.axis_min, spec.axis_max, spec.axis_count);
    std::vector<double> gammas;
    if (spec.axis == SweepAxis::Gamma) {
        gammas = axis;
    } else {
        gammas = spec.gamma_set;
        std::sort(gammas.begin(), gammas.end());
    }

    bool finite = finite_case(spec.case_tag);
    {
        std::ostringstream os;
        os << "case: " << to_string(spec.case_tag);
        table.metadata.push_back(os.str());
    }
    {
        std::ostringstream os;
        os << "axis: " << to_string(spec.axis) << " in [" << fmt(spec.axis_min)
           << ", " << fmt(spec.axis_max) << "] x " << spec.axis_count;
        table.metadata.push_back(os.str());
    }
    {
        std::ostringstream os;
        os << "evaluation point: ";
        if (spec.axis == SweepAxis::Nu)
            os << "t = " << fmt(finite ? spec.fixed_t : 0.0);
        else
            os << "nu = theta = " << fmt(m.theta)
               << (finite ? ", t = " + fmt(spec.fixed_t) : std::string());
        table.metadata.push_back(os.str());
    }
    {
        std::ostringstream os;
        os << "market: r=" << fmt(m.r) << " xi=" << fmt(m.xi)
           << " kappa=" << fmt(m.kappa) << " theta=" << fmt(m.theta)
           << " sigma=" << fmt(m.sigma) << " rho=" << fmt(m.rho);
        table.metadata.push_back(os.str());
    }
    {
        std::ostringstream os;
        os << "preferences: beta=" << fmt(p.beta) << " phi=" << fmt(p.phi);
        if (finite)
            os << " epsilon=" << fmt(p.epsilon) << " T=" << fmt(p.T);
        table.metadata.push_back(os.str());
    }
    if (spec.axis != SweepAxis::Gamma) {
        std::ostringstream os;
        os << "gammas:";
        for (double g : gammas) os << ' ' << fmt(g);
        table.metadata.push_back(os.str());
    }
    {
        std::ostringstream os;
        if (!unit_case(spec.case_tag))
            os << "solver: log-linear fixed point, damping=0.5 tol=1e-12";
        else
            os << "solver: closed form";
        if (finite) os << "; time grid n_steps=" << spec.n_steps;
        table.metadata.push_back(os.str());
    }

    for (double g : gammas) {
        PreferenceParams pg = p;
        pg.gamma = g;

        AffineSolution inf_sol;
        CoefficientPath fin_path;
        try {
            switch (spec.case_tag) {
            case CaseTag::InfUnit:
                inf_sol = solve_unit_eis(m, pg);
                break;
            case CaseTag::InfGeneral:
                inf_sol = solve_general_eis(m, pg).affine;
                break;
            case CaseTag::FinUnit:
                fin_path =
                    solve_unit_eis_finite(m, pg, TimeGrid{pg.T, spec.n_steps});
                break;
            default:
                fin_path = solve_general_eis_finite(m, pg,
                                                    TimeGrid{pg.T, spec.n_steps});
                break;
            }
        } catch (const InvalidPreferences& e) {
            rethrow_with_gamma(e, g);
        } catch (const NoRealRoot& e) {
            rethrow_with_gamma(e, g);
        } catch (const NoAdmissibleRoot& e) {
            rethrow_with_gamma(e, g);
        } catch (const ComplexA4& e) {
            rethrow_with_gamma(e, g);
        } catch (const NonConvergence& e) {
            rethrow_with_gamma(e, g);
        }

        auto evaluate = [&](double axis_value) {
            double nu = spec.axis == SweepAxis::Nu ? axis_value : m.theta;
            double t = spec.axis == SweepAxis::Time ? axis_value : spec.fixed_t;
            Strategy st = finite ? strategy_finite(fin_path, m, pg, t, nu)
                                 : strategy_infinite(inf_sol, m, pg, nu);
            table.rows.push_back({axis_value, g, st.c_over_x, st.pi});
        };
        if (spec.axis == SweepAxis::Gamma)
            evaluate(g);
        else
            for (double a : axis) evaluate(a);
    }
    return table;
}

namespace {

// RFC 4180: quote a field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    for (const auto& line : table.metadata) os << "# " << line << "\n";
    os << csv_field("axis_value") << ',' << csv_field("gamma") << ','
       << csv_field("c_over_x") << ',' << csv_field("pi") << "\n";
    char buf[160];
    for (const auto& row : table.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                      row.axis_value, row.gamma, row.c_over_x, row.pi);
        os << buf;
    }
}

} // namespace ezheston

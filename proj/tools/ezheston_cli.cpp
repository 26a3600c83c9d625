// Command-line front end. One binary, six subcommands:
//
//   solve     closed-form / integrated coefficients and the optimal strategy
//   verify    residual, first-order-condition and admissibility checks
//   ansatz    exponential-polynomial solvability judgement
//   simulate  Monte Carlo under the solved strategy
//   oracle    independent finite-horizon PDE solve vs the closed form
//   sweep     strategy tables over nu, calendar time or gamma
//
// Exit codes: 0 success, 2 invalid input or config, 3 solver failure,
// 4 verification failure. JSON goes to --out or stdout; grids are CSV.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ezheston/ansatz.hpp"
#include "ezheston/errors.hpp"
#include "ezheston/finite.hpp"
#include "ezheston/infinite.hpp"
#include "ezheston/model.hpp"
#include "ezheston/montecarlo.hpp"
#include "ezheston/rng.hpp"
#include "ezheston/sweep.hpp"
#include "ezheston/verify.hpp"

using nlohmann::ordered_json;
using namespace ezheston;

namespace {

constexpr const char* kConfigKeys =
    "Config file keys (flat key = value, '#' comments):\n"
    "  r        risk-free interest rate r\n"
    "  xi       market price of variance risk xi (excess drift = xi * nu);\n"
    "           accepts fractions such as 7/15\n"
    "  kappa    variance mean-reversion speed kappa\n"
    "  theta    long-run variance level theta\n"
    "  sigma    volatility of variance sigma\n"
    "  rho      correlation rho between asset and variance shocks, in [-1, 1]\n"
    "  nu0      initial variance nu_0\n"
    "  x0       initial wealth x_0\n"
    "  beta     rate of time preference beta\n"
    "  gamma    relative risk aversion gamma (1.0 selects the log branch)\n"
    "  phi      elasticity of intertemporal substitution phi\n"
    "           (exactly 1.0 selects the unit-EIS branch)\n"
    "  epsilon  bequest weight epsilon (finite horizon)\n"
    "  horizon  \"inf\" or the horizon length T in years\n";

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e) ||
        dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const InvalidPreferences*>(&e) ||
        dynamic_cast<const GridMismatch*>(&e) ||
        dynamic_cast<const DomainError*>(&e))
        return 2;
    return 3; // NoRealRoot, NoAdmissibleRoot, NonConvergence, ComplexA4, ...
}

struct CaseFlag {
    std::string value = "auto";

    CaseTag resolve(const Instance& inst) const {
        CaseTag actual = classify_case(inst.market, inst.prefs);
        if (value == "auto") return actual;
        CaseTag wanted;
        if (value == "inf-unit") wanted = CaseTag::InfUnit;
        else if (value == "inf-general") wanted = CaseTag::InfGeneral;
        else if (value == "fin-unit") wanted = CaseTag::FinUnit;
        else if (value == "fin-general") wanted = CaseTag::FinGeneral;
        else if (value == "log-utility") wanted = CaseTag::LogUtility;
        else throw ValidationError("unknown case '" + value + "'");
        if (wanted != actual)
            throw ValidationError(std::string("case mismatch: config classifies as ") +
                                  to_string(actual) + ", not " + value);
        return actual;
    }
};

void add_case_flag(CLI::App* cmd, CaseFlag& flag) {
    cmd->add_option("--case", flag.value,
                    "auto|inf-unit|inf-general|fin-unit|fin-general|log-utility; "
                    "an explicit value asserts the config's classification")
        ->default_val("auto");
}

Instance load_and_validate(const std::string& path) {
    Instance inst = load_config(path);
    auto mrep = validate_market(inst.market);
    auto prep = validate_preferences(inst.prefs);
    if (!mrep.ok() || !prep.ok()) {
        std::string all;
        for (const auto& e : mrep.errors) all += (all.empty() ? "" : "; ") + e;
        for (const auto& e : prep.errors) all += (all.empty() ? "" : "; ") + e;
        throw ValidationError(all);
    }
    return inst;
}

std::vector<std::string> collect_warnings(const Instance& inst) {
    std::vector<std::string> w;
    for (const auto& s : validate_market(inst.market).warnings) w.push_back(s);
    for (const auto& s : validate_preferences(inst.prefs).warnings) w.push_back(s);
    return w;
}

void emit(const ordered_json& j, const std::string& out_path) {
    std::string text = j.dump(2);
    text += '\n';
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw ValidationError("cannot open output file " + out_path);
        os << text;
    }
}

ordered_json strategy_json(const Strategy& st, double t, double nu) {
    ordered_json j;
    j["t"] = t;
    j["nu"] = nu;
    j["c_over_x"] = st.c_over_x;
    j["pi"] = st.pi;
    j["psi"] = st.psi;
    return j;
}

ordered_json diagnostics_json(const Instance& inst) {
    ordered_json d;
    d["feller_ratio"] = inst.market.feller_ratio();
    d["wellposed_region"] = wellposed_region(inst.prefs.gamma, inst.prefs.phi);
    d["warnings"] = collect_warnings(inst);
    return d;
}

bool is_finite_case(CaseTag tag, const Instance& inst) {
    if (tag == CaseTag::FinUnit || tag == CaseTag::FinGeneral) return true;
    return tag == CaseTag::LogUtility && inst.prefs.horizon == Horizon::Finite;
}

// ----------------------------------------------------------------- solve --

struct SolveArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    std::string path_out;
    int n_steps = 2000;
};

int cmd_solve(const SolveArgs& a) {
    Instance inst = load_and_validate(a.config);
    CaseTag tag = a.case_flag.resolve(inst);
    const auto& m = inst.market;
    const auto& p = inst.prefs;

    ordered_json j;
    j["case"] = to_string(tag);

    if (is_finite_case(tag, inst)) {
        CoefficientPath path;
        if (tag == CaseTag::FinGeneral)
            path = solve_general_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        else
            path = solve_unit_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        j["n_steps"] = a.n_steps;
        j["A0_T"] = path.A0.back();
        j["A1_T"] = path.A1.back();
        if (tag == CaseTag::FinGeneral) {
            j["zeta3_T"] = path.zeta3.back();
            j["zeta4_T"] = path.zeta4.back();
        }
        if (!a.path_out.empty()) {
            std::ofstream os(a.path_out, std::ios::binary);
            if (!os) throw ValidationError("cannot open output file " + a.path_out);
            write_path_csv(os, path);
            j["path_csv"] = a.path_out;
        } else {
            j["path_csv"] = nullptr;
        }
        j["strategy"] = strategy_json(strategy_finite(path, m, p, 0.0, m.theta),
                                      0.0, m.theta);
    } else if (tag == CaseTag::InfGeneral) {
        GeneralSolution sol = solve_general_eis(m, p);
        j["A0"] = sol.affine.A0;
        j["A1"] = sol.affine.A1;
        j["zeta1"] = sol.loglin.zeta1;
        j["zeta2"] = sol.loglin.zeta2;
        j["mean_log_cw"] = sol.loglin.mean_log_cw;
        j["iterations"] = sol.loglin.iterations;
        j["final_residual"] = sol.loglin.final_residual;
        j["strategy"] = strategy_json(strategy_infinite(sol.affine, m, p, m.theta),
                                      0.0, m.theta);
    } else {
        AffineSolution sol = solve_unit_eis(m, p);
        j["A0"] = sol.A0;
        j["A1"] = sol.A1;
        j["strategy"] = strategy_json(strategy_infinite(sol, m, p, m.theta),
                                      0.0, m.theta);
    }
    j["diagnostics"] = diagnostics_json(inst);
    emit(j, a.out);
    return 0;
}

// ---------------------------------------------------------------- verify --

struct VerifyArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    double tol = 0.0; // 0 = per-case defaults
    std::optional<double> override_a1;
    double nu_min = 0.005, nu_max = 0.09;
    int n_nu = 33;
    int n_steps = 2000;
};

double default_residual_tol(CaseTag tag) {
    switch (tag) {
        case CaseTag::FinGeneral: return 1e-6;
        case CaseTag::FinUnit: return 1e-8;
        default: return 1e-10;
    }
}

std::vector<double> linspace_vec(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

ordered_json residual_json(const ResidualReport& r) {
    ordered_json j;
    j["pde"] = r.pde_id;
    j["max_abs"] = r.max_abs;
    j["max_rel"] = r.max_rel;
    return j;
}

ordered_json admissibility_json(const AdmissibilityReport& r) {
    ordered_json j;
    j["pi_form_lhs"] = r.pi_form_lhs;
    j["pi_form_rhs"] = r.pi_form_rhs;
    j["pi_form_ok"] = r.pi_form_ok;
    j["a1_form_lhs"] = r.a1_form_lhs;
    j["a1_form_rhs"] = r.a1_form_rhs;
    j["a1_form_ok"] = r.a1_form_ok;
    j["note"] = r.note;
    return j;
}

int cmd_verify(const VerifyArgs& a) {
    Instance inst = load_and_validate(a.config);
    CaseTag tag = a.case_flag.resolve(inst);
    const auto& m = inst.market;
    const auto& p = inst.prefs;
    auto grid = linspace_vec(a.nu_min, a.nu_max, a.n_nu);
    double res_tol = a.tol > 0.0 ? a.tol : default_residual_tol(tag);
    double foc_tol = a.tol > 0.0 ? a.tol : 1e-5;

    ordered_json j;
    j["case"] = to_string(tag);
    bool pass = true;

    // FOC states: fixed substream so runs are reproducible.
    auto g = substream(20, 0);
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * g.uniform01(); };
    const int n_states = 20;

    ordered_json focs = ordered_json::array();
    double worst_dc = 0.0, worst_dpsi = 0.0;
    bool all_concave = true;

    if (is_finite_case(tag, inst)) {
        CoefficientPath path;
        if (tag == CaseTag::FinGeneral)
            path = solve_general_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        else
            path = solve_unit_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        if (a.override_a1)
            throw ValidationError("--override-A1 applies to infinite-horizon cases");

        auto res = reduced_pde_residual(path, m, p, grid);
        j["residual"] = residual_json(res);
        pass = pass && res.max_rel <= res_tol;
        if (tag == CaseTag::FinGeneral) {
            auto res_exact = reduced_pde_residual(path, m, p, grid, true);
            double at_theta =
                reduced_pde_residual_at(path, m, p, p.T / 2.0, m.theta, true);
            j["residual_exact"] = residual_json(res_exact);
            j["residual_exact_at_theta"] = at_theta;
            pass = pass && std::abs(at_theta) <= (a.tol > 0.0 ? a.tol : 1e-10);
        }
        for (int i = 0; i < n_states; ++i) {
            double t = draw(0.0, p.T);
            double x = draw(0.5, 2.0);
            double nu = draw(a.nu_min, a.nu_max);
            auto f = foc_gradient_check(path, m, p, t, x, nu);
            worst_dc = std::max(worst_dc, f.rel_dc);
            worst_dpsi = std::max(worst_dpsi, f.rel_dpsi);
            all_concave = all_concave && f.concave;
            pass = pass && f.pass(foc_tol);
        }
        auto adm = admissibility_check(path, m, p);
        j["admissibility"] = admissibility_json(adm);
        pass = pass && adm.pi_form_ok;
    } else {
        AffineSolution sol;
        ordered_json extra;
        if (tag == CaseTag::InfGeneral) {
            GeneralSolution gs = solve_general_eis(m, p);
            sol = gs.affine;
            if (a.override_a1) sol.A1 = *a.override_a1;
            GeneralSolution tampered = gs;
            tampered.affine = sol;
            auto res = reduced_pde_residual(tampered, m, p, grid);
            auto res_exact = reduced_pde_residual(tampered, m, p, grid, true);
            double at_theta = 0.0;
            {
                auto one = reduced_pde_residual(tampered, m, p, {m.theta}, true);
                at_theta = one.max_rel;
            }
            j["residual"] = residual_json(res);
            j["residual_exact"] = residual_json(res_exact);
            j["residual_exact_at_theta"] = at_theta;
            pass = pass && res.max_rel <= res_tol;
            pass = pass && at_theta <= (a.tol > 0.0 ? a.tol : 1e-10);
        } else {
            sol = solve_unit_eis(m, p);
            if (a.override_a1) sol.A1 = *a.override_a1;
            auto res = reduced_pde_residual(sol, m, p, grid);
            j["residual"] = residual_json(res);
            pass = pass && res.max_rel <= res_tol;
        }
        for (int i = 0; i < n_states; ++i) {
            double x = draw(0.5, 2.0);
            double nu = draw(a.nu_min, a.nu_max);
            auto f = foc_gradient_check(sol, m, p, x, nu);
            worst_dc = std::max(worst_dc, f.rel_dc);
            worst_dpsi = std::max(worst_dpsi, f.rel_dpsi);
            all_concave = all_concave && f.concave;
            pass = pass && f.pass(foc_tol);
        }
        auto adm = admissibility_check(sol, m, p);
        j["admissibility"] = admissibility_json(adm);
        pass = pass && adm.pi_form_ok;
    }

    ordered_json foc;
    foc["states"] = n_states;
    foc["worst_rel_dc"] = worst_dc;
    foc["worst_rel_dpsi"] = worst_dpsi;
    foc["all_concave"] = all_concave;
    j["foc"] = foc;
    j["pass"] = pass;
    emit(j, a.out);
    if (!pass) {
        std::cerr << "verification failed for case " << to_string(tag) << "\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------- ansatz --

struct AnsatzArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    std::string degrees_file;
    int order = 1;
    std::optional<double> gamma, rho, phi;
};

DegreeSpec parse_degrees(std::istream& in) {
    DegreeSpec d;
    bool got_eta_sq = false, got_m1 = false, got_eta_m2 = false, got_m2_sq = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        if (std::find_if(line.begin(), line.end(), notspace) == line.end()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("degrees line " + std::to_string(line_no) +
                              ": expected key = v0, v1, ...");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::vector<double> coeffs;
        std::stringstream items(line.substr(eq + 1));
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw ConfigError("degrees line " + std::to_string(line_no) +
                                  ": empty coefficient");
            coeffs.push_back(parse_decimal_or_fraction(item));
        }
        if (coeffs.empty())
            throw ConfigError("degrees key '" + key + "' has no coefficients");
        if (key == "eta_sq") { d.eta_sq = coeffs; got_eta_sq = true; }
        else if (key == "m1") { d.m1 = coeffs; got_m1 = true; }
        else if (key == "eta_m2") { d.eta_m2 = coeffs; got_eta_m2 = true; }
        else if (key == "m2_sq") { d.m2_sq = coeffs; got_m2_sq = true; }
        else throw ConfigError("unknown degrees key '" + key + "'");
    }
    if (!got_eta_sq || !got_m1 || !got_eta_m2 || !got_m2_sq)
        throw ConfigError("degrees file needs eta_sq, m1, eta_m2 and m2_sq");
    return d;
}

PdeCase pde_case_for(CaseTag tag) {
    switch (tag) {
        case CaseTag::InfUnit: return PdeCase::InfUnit;
        case CaseTag::InfGeneral: return PdeCase::InfGeneral;
        case CaseTag::FinUnit: return PdeCase::FinUnit;
        case CaseTag::FinGeneral: return PdeCase::FinGeneral;
        default:
            throw ValidationError(
                "no matching template for log utility; pass an explicit --case");
    }
}

int cmd_ansatz(const AnsatzArgs& a) {
    Instance inst = load_and_validate(a.config);
    DegreeSpec degrees;
    if (a.degrees_file.empty()) {
        degrees = heston_degrees(inst.market);
    } else {
        std::ifstream in(a.degrees_file);
        if (!in) throw ConfigError("cannot open degrees file " + a.degrees_file);
        degrees = parse_degrees(in);
    }
    AnsatzSpec spec;
    spec.order = a.order;
    spec.pde = pde_case_for(a.case_flag.resolve(inst));
    double gamma = a.gamma.value_or(inst.prefs.gamma);
    double rho = a.rho.value_or(inst.market.rho);
    double phi = a.phi.value_or(inst.prefs.phi);

    MatchReport rep = judge_solvability(degrees, spec, gamma, rho, phi);

    ordered_json j;
    j["order"] = a.order;
    j["gamma"] = gamma;
    j["rho"] = rho;
    j["phi"] = phi;
    j["verdict"] = to_string(rep.verdict);
    j["residual_powers"] = rep.residual_powers;
    j["witness_text"] = rep.witness_text;
    if (std::isnan(rep.required_rho_sq))
        j["required_rho_sq"] = nullptr;
    else
        j["required_rho_sq"] = rep.required_rho_sq;
    j["matched_system_size"] = rep.matched_system_size;
    j["equations"] = rep.equations;
    emit(j, a.out);
    return 0;
}

// -------------------------------------------------------------- simulate --

struct SimulateArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    std::string paths_out;
    int n_paths = 10000;
    double dt = 0.01;
    std::optional<double> t_sim;
    std::uint64_t seed = 0;
    bool antithetic = false;
    bool store_paths = false;
    int n_steps = 2000;
};

int cmd_simulate(const SimulateArgs& a) {
    Instance inst = load_and_validate(a.config);
    CaseTag tag = a.case_flag.resolve(inst);
    const auto& m = inst.market;
    const auto& p = inst.prefs;

    SimConfig cfg;
    cfg.n_paths = a.n_paths;
    cfg.dt = a.dt;
    cfg.T_sim = a.t_sim.value_or(p.horizon == Horizon::Finite ? p.T : 10.0);
    cfg.seed = a.seed;
    cfg.antithetic = a.antithetic;
    cfg.store_paths = a.store_paths;

    PathEnsemble base = simulate_heston(m, cfg);
    PathEnsemble ens;
    if (is_finite_case(tag, inst)) {
        CoefficientPath path;
        if (tag == CaseTag::FinGeneral)
            path = solve_general_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        else
            path = solve_unit_eis_finite(m, p, TimeGrid{p.T, a.n_steps});
        ens = simulate_wealth(m, p, path, base);
    } else {
        AffineSolution sol = tag == CaseTag::InfGeneral
                                 ? solve_general_eis(m, p).affine
                                 : solve_unit_eis(m, p);
        ens = simulate_wealth(m, p, sol, base);
    }
    SimSummary s = summarize(ens);

    ordered_json j;
    j["case"] = to_string(tag);
    j["n_paths"] = s.n_paths;
    j["dt"] = cfg.dt;
    j["T_sim"] = cfg.T_sim;
    j["seed"] = cfg.seed;
    j["antithetic"] = cfg.antithetic;
    j["generator"] = ens.generator;
    j["scheme"] = ens.scheme;
    j["terminal_wealth_mean"] = s.terminal_wealth_mean;
    j["terminal_log_wealth_mean"] = s.terminal_log_wealth_mean;
    if (s.std_available) {
        j["terminal_log_wealth_std"] = s.terminal_log_wealth_std;
        j["terminal_log_wealth_se"] = s.terminal_log_wealth_se;
    } else {
        j["terminal_log_wealth_std"] = nullptr;
        j["terminal_log_wealth_se"] = nullptr;
    }
    j["nu_mean_at_T"] = s.nu_mean.back();
    j["nu_se_at_T"] = s.nu_se.back();
    j["c_over_x_min"] = s.c_ratio_min;
    j["c_over_x_max"] = s.c_ratio_max;
    j["all_positive"] = s.positive;

    if (!a.paths_out.empty()) {
        std::ofstream os(a.paths_out, std::ios::binary);
        if (!os) throw ValidationError("cannot open output file " + a.paths_out);
        write_paths_csv(os, ens);
        j["paths_csv"] = a.paths_out;
    }
    emit(j, a.out);
    return 0;
}

// ---------------------------------------------------------------- oracle --

struct OracleArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    OracleMesh mesh;
    double tol = 1e-3;
};

int cmd_oracle(const OracleArgs& a) {
    Instance inst = load_and_validate(a.config);
    CaseTag tag = a.case_flag.resolve(inst);
    if (!is_finite_case(tag, inst))
        throw ValidationError("the PDE oracle needs a finite-horizon config");

    OracleComparison oc = tag == CaseTag::FinGeneral
                              ? pde_oracle_finite_general(inst.market, inst.prefs, a.mesh)
                              : pde_oracle_finite_unit(inst.market, inst.prefs, a.mesh);

    if (!a.out.empty()) {
        std::ofstream os(a.out, std::ios::binary);
        if (!os) throw ValidationError("cannot open output file " + a.out);
        write_oracle_csv(os, oc);
    }
    char line[160];
    std::snprintf(line, sizeof line,
                  "case=%s n_nu=%d n_tau=%d interior max_rel_diff = %.6e (tol %g)\n",
                  to_string(tag), a.mesh.n_nu, a.mesh.n_tau, oc.max_rel_diff, a.tol);
    std::cout << line;
    if (!(oc.max_rel_diff <= a.tol)) {
        std::cerr << "oracle disagreement above tolerance\n";
        return 4;
    }
    return 0;
}

// ----------------------------------------------------------------- sweep --

struct SweepArgs {
    std::string config;
    CaseFlag case_flag;
    std::string out;
    std::string axis = "nu";
    std::optional<double> min, max;
    int count = 50;
    std::vector<double> gammas;
    double fixed_t = 0.0;
    int n_steps = 2000;
};

int cmd_sweep(const SweepArgs& a) {
    Instance inst = load_and_validate(a.config);
    CaseTag tag = a.case_flag.resolve(inst);

    SweepSpec spec;
    if (a.axis == "nu") spec.axis = SweepAxis::Nu;
    else if (a.axis == "t") spec.axis = SweepAxis::Time;
    else if (a.axis == "gamma") spec.axis = SweepAxis::Gamma;
    else throw ValidationError("unknown axis '" + a.axis + "' (nu|t|gamma)");

    spec.case_tag = tag;
    spec.n_steps = a.n_steps;
    spec.fixed_t = a.fixed_t;
    spec.axis_count = a.count;
    if (!a.gammas.empty()) spec.gamma_set = a.gammas;
    switch (spec.axis) {
        case SweepAxis::Nu:
            spec.axis_min = a.min.value_or(0.0025);
            spec.axis_max = a.max.value_or(0.09);
            break;
        case SweepAxis::Time:
            spec.axis_min = a.min.value_or(0.0);
            spec.axis_max = a.max.value_or(inst.prefs.T);
            break;
        case SweepAxis::Gamma:
            spec.axis_min = a.min.value_or(1.5);
            spec.axis_max = a.max.value_or(5.0);
            break;
    }

    SweepTable table = run_sweep(spec, inst.market, inst.prefs);
    if (a.out.empty()) {
        write_sweep_csv(std::cout, table);
    } else {
        std::ofstream os(a.out, std::ios::binary);
        if (!os) throw ValidationError("cannot open output file " + a.out);
        write_sweep_csv(os, table);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consumption-investment strategies under square-root"
                 " stochastic variance with recursive preferences"};
    app.require_subcommand(1);
    app.footer(kConfigKeys);

    SolveArgs so;
    auto* solve = app.add_subcommand("solve", "Solve the configured case and "
                                              "report coefficients and strategy");
    solve->add_option("config", so.config, "config file")->required();
    add_case_flag(solve, so.case_flag);
    solve->add_option("--out", so.out, "write JSON here instead of stdout");
    solve->add_option("--path-out", so.path_out,
                      "write the finite-horizon coefficient path CSV here");
    solve->add_option("--n-steps", so.n_steps, "finite-horizon integration steps")
        ->default_val(2000);

    VerifyArgs ve;
    auto* verify = app.add_subcommand("verify", "Check residuals, first-order "
                                                "conditions and admissibility");
    verify->add_option("config", ve.config, "config file")->required();
    add_case_flag(verify, ve.case_flag);
    verify->add_option("--out", ve.out, "write JSON here instead of stdout");
    verify->add_option("--tol", ve.tol,
                       "override every tolerance (default: per-case)");
    double override_a1 = 0.0;
    auto* ov = verify->add_option("--override-A1", override_a1,
                                  "replace the solved slope coefficient before "
                                  "checking (tamper probe, infinite horizon)");
    verify->add_option("--nu-min", ve.nu_min, "residual grid lower edge")
        ->default_val(0.005);
    verify->add_option("--nu-max", ve.nu_max, "residual grid upper edge")
        ->default_val(0.09);
    verify->add_option("--n-nu", ve.n_nu, "residual grid nodes")->default_val(33);
    verify->add_option("--n-steps", ve.n_steps, "finite-horizon integration steps")
        ->default_val(2000);

    AnsatzArgs an;
    auto* ansatz = app.add_subcommand("ansatz", "Judge exponential-polynomial "
                                                "solvability of the reduced equation");
    ansatz->add_option("config", an.config, "config file")->required();
    add_case_flag(ansatz, an.case_flag);
    ansatz->add_option("--out", an.out, "write JSON here instead of stdout");
    ansatz->add_option("--degrees", an.degrees_file,
                       "degree spec file (default: the configured market); keys "
                       "eta_sq, m1, eta_m2, m2_sq = comma-separated coefficients, "
                       "lowest power first");
    ansatz->add_option("--order", an.order, "exponent polynomial order n")
        ->required();
    double g_over = 0, r_over = 0, p_over = 0;
    auto* og = ansatz->add_option("--gamma", g_over, "override gamma");
    auto* orr = ansatz->add_option("--rho", r_over, "override rho");
    auto* op = ansatz->add_option("--phi", p_over, "override phi");

    SimulateArgs si;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo of variance and "
                                                    "wealth under the solved strategy");
    simulate->add_option("config", si.config, "config file")->required();
    add_case_flag(simulate, si.case_flag);
    simulate->add_option("--out", si.out, "write JSON here instead of stdout");
    simulate->add_option("--n-paths", si.n_paths, "number of paths")
        ->default_val(10000);
    simulate->add_option("--dt", si.dt, "time step")->default_val(0.01);
    double tsim = 0.0;
    auto* ot = simulate->add_option("--t-sim", tsim,
                                    "simulated span (default: T, or 10 when "
                                    "the horizon is infinite)");
    simulate->add_option("--seed", si.seed, "RNG seed")->default_val(0);
    simulate->add_flag("--antithetic", si.antithetic,
                       "mirrored path pairs (n-paths must be even)");
    simulate->add_flag("--store-paths", si.store_paths,
                       "keep dense per-path series (enables --paths-out)");
    simulate->add_option("--paths-out", si.paths_out, "per-path CSV output");
    simulate->add_option("--n-steps", si.n_steps,
                         "finite-horizon integration steps")
        ->default_val(2000);

    OracleArgs orc;
    auto* oracle = app.add_subcommand("oracle", "Independent PDE solve compared "
                                                "against the closed form");
    oracle->add_option("config", orc.config, "config file")->required();
    add_case_flag(oracle, orc.case_flag);
    oracle->add_option("--out", orc.out, "comparison grid CSV output");
    oracle->add_option("--nu-min", orc.mesh.nu_min, "grid lower edge")
        ->default_val(0.005);
    oracle->add_option("--nu-max", orc.mesh.nu_max, "grid upper edge")
        ->default_val(0.09);
    oracle->add_option("--n-nu", orc.mesh.n_nu, "spatial nodes")->default_val(61);
    oracle->add_option("--n-tau", orc.mesh.n_tau, "outer time steps")
        ->default_val(4000);
    oracle->add_option("--checkpoints", orc.mesh.checkpoints,
                       "comparison times including both ends")
        ->default_val(11);
    oracle->add_option("--tol", orc.tol, "pass threshold on interior max_rel_diff")
        ->default_val(1e-3);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Strategy tables over nu, calendar "
                                              "time or gamma");
    sweep->add_option("config", sw.config, "config file")->required();
    add_case_flag(sweep, sw.case_flag);
    sweep->add_option("--out", sw.out, "CSV output (default stdout)");
    sweep->add_option("--axis", sw.axis, "nu|t|gamma")->default_val("nu");
    double mn = 0, mx = 0;
    auto* omn = sweep->add_option("--min", mn, "axis lower end");
    auto* omx = sweep->add_option("--max", mx, "axis upper end");
    sweep->add_option("--count", sw.count, "axis nodes")->default_val(50);
    sweep->add_option("--gammas", sw.gammas,
                      "gamma values for nu/t sweeps (comma-separated)")
        ->delimiter(',');
    sweep->add_option("--fixed-t", sw.fixed_t,
                      "evaluation time for finite-horizon nu sweeps")
        ->default_val(0.0);
    sweep->add_option("--n-steps", sw.n_steps, "finite-horizon integration steps")
        ->default_val(2000);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*solve) return cmd_solve(so);
        if (*verify) {
            if (ov->count()) ve.override_a1 = override_a1;
            return cmd_verify(ve);
        }
        if (*ansatz) {
            if (og->count()) an.gamma = g_over;
            if (orr->count()) an.rho = r_over;
            if (op->count()) an.phi = p_over;
            return cmd_ansatz(an);
        }
        if (*simulate) {
            if (ot->count()) si.t_sim = tsim;
            return cmd_simulate(si);
        }
        if (*oracle) return cmd_oracle(orc);
        if (*sweep) return cmd_sweep(sw);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

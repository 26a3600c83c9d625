#include "ezheston/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ezheston {

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::InfUnit: return "inf-unit";
        case CaseTag::InfGeneral: return "inf-general";
        case CaseTag::FinUnit: return "fin-unit";
        case CaseTag::FinGeneral: return "fin-general";
        case CaseTag::LogUtility: return "log-utility";
    }
    return "?";
}

ValidationReport validate_market(const MarketParams& m) {
    ValidationReport rep;
    auto bad = [&](const std::string& s) { rep.errors.push_back(s); };
    if (!(m.r > 0.0)) bad("r must be positive");
    if (!(m.xi >= 0.0)) bad("xi must be nonnegative");
    if (!(m.kappa > 0.0)) bad("kappa must be positive");
    if (!(m.theta > 0.0)) bad("theta must be positive");
    if (!(m.sigma > 0.0)) bad("sigma must be positive");
    if (!(m.rho >= -1.0 && m.rho <= 1.0)) bad("rho out of [-1,1]");
    if (!(m.nu0 > 0.0)) bad("nu0 must be positive");
    if (!(m.x0 > 0.0)) bad("x0 must be positive");
    if (rep.ok() && m.feller_ratio() < 1.0) {
        std::ostringstream os;
        os << "variance process can reach zero: 2*kappa*theta/sigma^2 = "
           << m.feller_ratio() << " < 1";
        rep.warnings.push_back(os.str());
    }
    return rep;
}

int wellposed_region(double gamma, double phi) {
    if (gamma > 1.0 && phi > 1.0) return 1;
    if (gamma > 1.0 && phi < 1.0 && gamma * phi <= 1.0) return 2;
    if (gamma < 1.0 && phi < 1.0) return 3;
    if (gamma < 1.0 && phi > 1.0 && gamma * phi >= 1.0) return 4;
    return 0;
}

ValidationReport validate_preferences(const PreferenceParams& p) {
    ValidationReport rep;
    auto bad = [&](const std::string& s) { rep.errors.push_back(s); };
    if (!(p.beta > 0.0)) bad("beta must be positive");
    if (!(p.gamma > 0.0)) bad("gamma must be positive");
    if (!(p.phi > 0.0)) bad("phi must be positive");
    if (p.horizon == Horizon::Finite) {
        if (!(p.T > 0.0)) bad("finite horizon requires T > 0");
        if (!(p.epsilon > 0.0)) bad("epsilon must be positive");
    }
    if (p.gamma > 0.0 && p.phi > 0.0) {
        if (p.gamma == 1.0 && p.phi != 1.0) {
            bad("gamma = 1 with phi != 1 is outside every solver case");
        } else if (p.gamma != 1.0 && p.phi != 1.0 &&
                   wellposed_region(p.gamma, p.phi) == 0) {
            std::ostringstream os;
            os << "(gamma, phi) = (" << p.gamma << ", " << p.phi
               << ") lies in none of the four well-posedness regions";
            bad(os.str());
        }
    }
    if (rep.ok() && !(p.phi <= 1.0 && p.gamma > 1.0)) {
        rep.warnings.push_back(
            "outside the focus region phi <= 1 and gamma > 1; "
            "numerical behavior is less thoroughly characterized there");
    }
    return rep;
}

CaseTag classify_case(const MarketParams& m, const PreferenceParams& p) {
    auto mrep = validate_market(m);
    auto prep = validate_preferences(p);
    if (!mrep.ok() || !prep.ok()) {
        std::string all;
        for (const auto& e : mrep.errors) all += (all.empty() ? "" : "; ") + e;
        for (const auto& e : prep.errors) all += (all.empty() ? "" : "; ") + e;
        throw InvalidPreferences("instance rejected: " + all);
    }
    if (p.phi == 1.0 && p.gamma == 1.0) return CaseTag::LogUtility;
    if (p.horizon == Horizon::Infinite)
        return p.phi == 1.0 ? CaseTag::InfUnit : CaseTag::InfGeneral;
    return p.phi == 1.0 ? CaseTag::FinUnit : CaseTag::FinGeneral;
}

double parse_decimal_or_fraction(const std::string& text) {
    auto parse_plain = [](const std::string& s) -> double {
        const char* b = s.data();
        const char* e = s.data() + s.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e)
            throw ConfigError("cannot parse number '" + s + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) return parse_plain(text);
    double num = parse_plain(text.substr(0, slash));
    double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw ConfigError("zero denominator in '" + text + "'");
    return num / den;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Instance parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        kv[key] = val;
    }

    static const char* known[] = {"r",    "xi",    "kappa",   "theta", "sigma",
                                  "rho",  "nu0",   "x0",      "beta",  "gamma",
                                  "phi",  "epsilon", "horizon"};
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* name : known) ok = ok || (k == name);
        if (!ok) throw ConfigError("unknown key '" + k + "'");
    }

    auto need = [&](const std::string& k) -> std::string {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("missing key '" + k + "'");
        return it->second;
    };

    Instance inst;
    inst.market.r = parse_decimal_or_fraction(need("r"));
    inst.market.xi = parse_decimal_or_fraction(need("xi"));
    inst.market.kappa = parse_decimal_or_fraction(need("kappa"));
    inst.market.theta = parse_decimal_or_fraction(need("theta"));
    inst.market.sigma = parse_decimal_or_fraction(need("sigma"));
    inst.market.rho = parse_decimal_or_fraction(need("rho"));
    inst.market.nu0 = parse_decimal_or_fraction(need("nu0"));
    inst.market.x0 = parse_decimal_or_fraction(need("x0"));
    inst.prefs.beta = parse_decimal_or_fraction(need("beta"));
    inst.prefs.gamma = parse_decimal_or_fraction(need("gamma"));
    inst.prefs.phi = parse_decimal_or_fraction(need("phi"));
    inst.prefs.epsilon =
        kv.count("epsilon") ? parse_decimal_or_fraction(kv["epsilon"]) : 1.0;

    std::string hz = need("horizon");
    if (hz == "inf" || hz == "infinite") {
        inst.prefs.horizon = Horizon::Infinite;
        inst.prefs.T = 0.0;
    } else {
        inst.prefs.horizon = Horizon::Finite;
        inst.prefs.T = parse_decimal_or_fraction(hz);
        if (!(inst.prefs.T > 0.0))
            throw ConfigError("horizon must be 'inf' or a positive number");
    }
    return inst;
}

Instance load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(f);
}

} // namespace ezheston

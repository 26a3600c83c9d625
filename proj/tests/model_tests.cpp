#include <doctest.h>

#include <sstream>

#include "ezheston/model.hpp"

using namespace ezheston;

namespace {

MarketParams baseline_market() {
    MarketParams m;
    m.r = 0.05;
    m.xi = 7.0 / 15.0;
    m.kappa = 5.0;
    m.theta = 0.0225;
    m.sigma = 0.25;
    m.rho = -0.5;
    m.nu0 = 0.0225;
    m.x0 = 1.0;
    return m;
}

PreferenceParams baseline_prefs() {
    PreferenceParams p;
    p.beta = 0.08;
    p.gamma = 2.0;
    p.phi = 0.125;
    p.epsilon = 1.0;
    return p;
}

constexpr const char* kConfigText =
    "# comment line\n"
    "r = 0.05\n"
    "xi = 7/15   # fraction form\n"
    "kappa = 5\n"
    "theta = 0.0225\n"
    "sigma = 0.25\n"
    "rho = -0.5\n"
    "nu0 = 0.0225\n"
    "x0 = 1.0\n"
    "beta = 0.08\n"
    "gamma = 2\n"
    "phi = 0.125\n"
    "epsilon = 1.0\n"
    "horizon = inf\n";

} // namespace

TEST_CASE("decimal and fraction parsing") {
    CHECK(parse_decimal_or_fraction("0.25") == 0.25);
    CHECK(parse_decimal_or_fraction("7/15") == 7.0 / 15.0);
    CHECK(parse_decimal_or_fraction("-0.5") == -0.5);
    CHECK_THROWS_AS(parse_decimal_or_fraction("abc"), ConfigError);
    CHECK_THROWS_AS(parse_decimal_or_fraction("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_decimal_or_fraction(""), ConfigError);
}

TEST_CASE("config parsing round trip") {
    std::istringstream in(kConfigText);
    Instance inst = parse_config(in);
    CHECK(inst.market.xi == 7.0 / 15.0);
    CHECK(inst.market.rho == -0.5);
    CHECK(inst.prefs.beta == 0.08);
    CHECK(inst.prefs.horizon == Horizon::Infinite);

    SUBCASE("finite horizon in years") {
        std::string finite(kConfigText);
        finite.replace(finite.find("horizon = inf"), 13, "horizon = 10\n");
        std::istringstream fin(finite);
        Instance fi = parse_config(fin);
        CHECK(fi.prefs.horizon == Horizon::Finite);
        CHECK(fi.prefs.T == 10.0);
    }
}

TEST_CASE("config rejects unknown and missing keys") {
    {
        std::istringstream in(std::string(kConfigText) + "mystery = 1\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    {
        std::string text(kConfigText);
        text.erase(text.find("sigma = 0.25\n"), 13);
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
}

TEST_CASE("market validation") {
    auto m = baseline_market();
    CHECK(validate_market(m).ok());

    SUBCASE("rho outside [-1,1]") {
        m.rho = 2.0;
        auto rep = validate_market(m);
        CHECK_FALSE(rep.ok());
        CHECK(rep.errors.front().find("rho") != std::string::npos);
    }
    SUBCASE("nonpositive sigma") {
        m.sigma = 0.0;
        CHECK_FALSE(validate_market(m).ok());
    }
    SUBCASE("nonpositive theta") {
        m.theta = -0.01;
        CHECK_FALSE(validate_market(m).ok());
    }
    SUBCASE("feller violation warns but passes") {
        m.sigma = 2.0; // 2 kappa theta = 0.225 < 4
        auto rep = validate_market(m);
        CHECK(rep.ok());
        CHECK_FALSE(rep.warnings.empty());
    }
}

TEST_CASE("preference validation") {
    auto p = baseline_prefs();
    CHECK(validate_preferences(p).ok());
    p.gamma = 0.0;
    CHECK_FALSE(validate_preferences(p).ok());
    p = baseline_prefs();
    p.beta = -0.1;
    CHECK_FALSE(validate_preferences(p).ok());
    p = baseline_prefs();
    p.horizon = Horizon::Finite;
    p.T = 0.0;
    CHECK_FALSE(validate_preferences(p).ok());
    p.T = -3.0;
    CHECK_FALSE(validate_preferences(p).ok());
    p = baseline_prefs();
    p.horizon = Horizon::Finite;
    p.T = 10.0;
    p.epsilon = 0.0;
    CHECK_FALSE(validate_preferences(p).ok());

    SUBCASE("region-0 pairs are rejected") {
        PreferenceParams q = baseline_prefs();
        q.gamma = 2.0;
        q.phi = 0.9; // gamma*phi > 1
        CHECK_FALSE(validate_preferences(q).ok());
    }
    SUBCASE("outside the focus region warns") {
        PreferenceParams q = baseline_prefs();
        q.gamma = 0.5;
        q.phi = 0.5;
        auto rep = validate_preferences(q);
        CHECK(rep.ok());
        CHECK_FALSE(rep.warnings.empty());
    }
}

TEST_CASE("case classification") {
    auto m = baseline_market();
    auto p = baseline_prefs();

    CHECK(classify_case(m, p) == CaseTag::InfGeneral);
    p.phi = 1.0;
    CHECK(classify_case(m, p) == CaseTag::InfUnit);
    p.gamma = 1.0;
    CHECK(classify_case(m, p) == CaseTag::LogUtility);
    p.gamma = 2.0;
    p.horizon = Horizon::Finite;
    p.T = 10.0;
    CHECK(classify_case(m, p) == CaseTag::FinUnit);
    p.phi = 0.125;
    CHECK(classify_case(m, p) == CaseTag::FinGeneral);

    SUBCASE("gamma = 1 with phi != 1 has no solver") {
        p.horizon = Horizon::Infinite;
        p.gamma = 1.0;
        p.phi = 0.5;
        CHECK_THROWS_AS(classify_case(m, p), InvalidPreferences);
    }
}

TEST_CASE("wellposedness regions") {
    CHECK(wellposed_region(2.0, 1.5) == 1);
    CHECK(wellposed_region(2.0, 0.125) == 2);
    CHECK(wellposed_region(0.5, 0.5) == 3);
    CHECK(wellposed_region(0.5, 2.5) == 4);
    CHECK(wellposed_region(2.0, 0.9) == 0);  // gamma*phi > 1 with phi < 1
    CHECK(wellposed_region(0.5, 1.5) == 0);  // gamma*phi < 1 with phi > 1
}

TEST_CASE("state coefficient functions") {
    auto m = baseline_market();
    double nu = 0.04;
    CHECK(m.eta(nu) == doctest::Approx(m.xi * std::sqrt(nu)).epsilon(1e-15));
    CHECK(m.m1(nu) == doctest::Approx(m.kappa * (m.theta - nu)).epsilon(1e-15));
    CHECK(m.m2(nu) == doctest::Approx(m.sigma * std::sqrt(nu)).epsilon(1e-15));
    CHECK(m.feller_ratio() == doctest::Approx(3.6).epsilon(1e-12));
}

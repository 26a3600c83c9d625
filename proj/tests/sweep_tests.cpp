#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "ezheston/model.hpp"
#include "ezheston/sweep.hpp"

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
    return m;
}

PreferenceParams prefs(double phi, double T = 0.0) {
    PreferenceParams p;
    p.beta = 0.08;
    p.gamma = 2.0;
    p.phi = phi;
    if (T > 0.0) {
        p.horizon = Horizon::Finite;
        p.T = T;
    }
    return p;
}

// rows regrouped as curves keyed by gamma, in axis order
std::map<double, std::vector<SweepRow>> curves(const SweepTable& t) {
    std::map<double, std::vector<SweepRow>> out;
    for (const auto& r : t.rows) out[r.gamma].push_back(r);
    return out;
}

} // namespace

TEST_CASE("variance sweep of the unit-EIS solution") {
    SweepSpec spec;
    spec.axis = SweepAxis::Nu;
    spec.case_tag = CaseTag::InfUnit;
    spec.axis_count = 12;
    auto table = run_sweep(spec, baseline_market(), prefs(1.0));

    CHECK(table.rows.size() == 12 * spec.gamma_set.size());
    auto byg = curves(table);
    CHECK(byg.size() == spec.gamma_set.size());

    for (auto& [g, rows] : byg) {
        for (size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].c_over_x == 0.08); // impatience rate, bitwise
            CHECK(rows[i].pi == rows[0].pi); // weight independent of nu
            if (i) CHECK(rows[i].axis_value > rows[i - 1].axis_value);
        }
    }
    // risky weight falls with risk aversion at every node
    auto it = byg.begin();
    for (auto next = std::next(it); next != byg.end(); ++it, ++next)
        CHECK(next->second[0].pi < it->second[0].pi);
}

TEST_CASE("variance sweep of the general-EIS solution") {
    SweepSpec spec;
    spec.axis = SweepAxis::Nu;
    spec.case_tag = CaseTag::InfGeneral;
    spec.axis_count = 9;
    auto table = run_sweep(spec, baseline_market(), prefs(0.125));

    for (auto& [g, rows] : curves(table)) {
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].c_over_x > rows[i - 1].c_over_x); // rises with nu
            CHECK(rows[i].pi == doctest::Approx(rows[0].pi).epsilon(1e-15));
        }
    }
    auto byg = curves(table);
    auto it = byg.begin();
    for (auto next = std::next(it); next != byg.end(); ++it, ++next) {
        CHECK(next->second[0].c_over_x < it->second[0].c_over_x);
        CHECK(next->second[0].pi < it->second[0].pi);
    }
}

TEST_CASE("risk-aversion sweep supplies gammas from the axis") {
    SweepSpec spec;
    spec.axis = SweepAxis::Gamma;
    spec.axis_min = 1.5;
    spec.axis_max = 5.0;
    spec.axis_count = 15;
    spec.case_tag = CaseTag::InfGeneral;
    auto table = run_sweep(spec, baseline_market(), prefs(0.125));

    CHECK(table.rows.size() == 15);
    for (size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].gamma > table.rows[i - 1].gamma);
        CHECK(table.rows[i].gamma == table.rows[i].axis_value);
        CHECK(table.rows[i].pi < table.rows[i - 1].pi);
    }
    CHECK(table.rows.front().gamma == 1.5);
    CHECK(table.rows.back().gamma == 5.0);
}

TEST_CASE("time sweep of the finite-horizon weight is nearly flat here") {
    SweepSpec spec;
    spec.axis = SweepAxis::Time;
    spec.axis_min = 0.0;
    spec.axis_max = 10.0;
    spec.axis_count = 40;
    spec.case_tag = CaseTag::FinUnit;
    spec.gamma_set = {2.0};
    auto table = run_sweep(spec, baseline_market(), prefs(1.0, 10.0));

    CHECK(table.rows.size() == 40);
    double tv = 0.0;
    for (size_t i = 1; i < table.rows.size(); ++i) {
        tv += std::abs(table.rows[i].pi - table.rows[i - 1].pi);
        CHECK(table.rows[i].c_over_x == 0.08);
    }
    CHECK(tv < 0.02);
    // hedging demand dies at the terminal date, leaving the myopic weight
    CHECK(table.rows.back().pi < table.rows.front().pi);
    CHECK(table.rows.back().pi ==
          doctest::Approx(baseline_market().xi / 2.0).epsilon(1e-12));
}

TEST_CASE("sweep CSV carries metadata then a fixed header") {
    SweepSpec spec;
    spec.axis = SweepAxis::Nu;
    spec.case_tag = CaseTag::InfUnit;
    spec.axis_count = 3;
    spec.gamma_set = {2.0};
    auto table = run_sweep(spec, baseline_market(), prefs(1.0));
    CHECK_FALSE(table.metadata.empty());

    std::ostringstream os;
    write_sweep_csv(os, table);
    std::istringstream is(os.str());
    std::string line;
    size_t meta = 0;
    while (std::getline(is, line) && line.rfind("# ", 0) == 0) ++meta;
    CHECK(meta == table.metadata.size());
    CHECK(line == "axis_value,gamma,c_over_x,pi");
    size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == table.rows.size());
}

TEST_CASE("sweep spec validation") {
    auto m = baseline_market();
    SweepSpec spec;

    spec.axis_count = 0;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.axis_min = 0.09;
    spec.axis_max = 0.01;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.case_tag = CaseTag::LogUtility;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(1.0)), ValidationError);
    spec = {};
    spec.axis = SweepAxis::Gamma;
    spec.axis_min = 0.8;
    spec.axis_max = 5.0;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.gamma_set = {2.0, 2.0};
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.gamma_set = {};
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.gamma_set = {0.5, 2.0};
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.axis_min = 0.0;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError);
    spec = {};
    spec.axis = SweepAxis::Time;
    spec.axis_min = 0.0;
    spec.axis_max = 10.0;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError); // infinite case
    spec.case_tag = CaseTag::FinGeneral;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError); // T = 0
    auto fp = prefs(0.125, 8.0);
    CHECK_THROWS_AS(run_sweep(spec, m, fp), ValidationError); // axis_max > T
    spec.axis_max = 8.0;
    spec.fixed_t = 9.0;
    CHECK_THROWS_AS(run_sweep(spec, m, fp), ValidationError); // fixed_t > T
    spec = {};
    spec.case_tag = CaseTag::InfUnit;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(0.125)), ValidationError); // phi != 1
    spec.case_tag = CaseTag::InfGeneral;
    CHECK_THROWS_AS(run_sweep(spec, m, prefs(1.0)), ValidationError); // phi == 1
}

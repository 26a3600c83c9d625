#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ezheston/model.hpp"

namespace ezheston {

enum class SweepAxis { Nu, Time, Gamma };

const char* to_string(SweepAxis axis);

// Strategy curves against one axis, one curve per risk aversion. Evaluation
// point conventions: nu sweeps run at t = fixed_t (finite horizon), time
// sweeps and gamma sweeps run at nu = theta. For the gamma axis the grid
// itself supplies the risk aversions and gamma_set is ignored.
struct SweepSpec {
    SweepAxis axis = SweepAxis::Nu;
    double axis_min = 0.0025;
    double axis_max = 0.09;
    int axis_count = 50;
    std::vector<double> gamma_set = {1.5, 2.0, 2.5, 3.0};
    CaseTag case_tag = CaseTag::InfGeneral;
    double fixed_t = 0.0;
    int n_steps = 2000; // time grid for finite-horizon solves
};

struct SweepRow {
    double axis_value = 0.0;
    double gamma = 0.0;
    double c_over_x = 0.0;
    double pi = 0.0;
};

struct SweepTable {
    SweepSpec spec;
    std::vector<std::string> metadata; // emitted as '#'-prefixed header lines
    std::vector<SweepRow> rows;        // sorted by gamma, then axis value
};

// One solve per gamma, reused across axis nodes. Throws ValidationError on a
// bad spec; solver errors carry the offending gamma in the message.
SweepTable run_sweep(const SweepSpec& spec, const MarketParams& m,
                     const PreferenceParams& p);

// '#' metadata lines, then axis_value,gamma,c_over_x,pi rows.
void write_sweep_csv(std::ostream& os, const SweepTable& table);

} // namespace ezheston

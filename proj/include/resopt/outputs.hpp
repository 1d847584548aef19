#pragma once

#include <string>
#include <utility>
#include <vector>

#include "resopt/scenario.hpp"
#include "resopt/sim.hpp"

namespace resopt {

using Rows = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip text for a double ("inf", "-inf", "nan" for the specials).
std::string format_number(double v);

/// Header: t, then per agent i (1-based) x{i}_{k}..., y{i}, rho{i}, z{i}
/// (suffixed _{k} when q > 1), u{i}_{k}..., eta_g{i}, eta_h{i}, then r_state
/// (1-based graph index) and attack_active (0/1).
std::string trajectory_header(const Trajectory& t);
std::string trajectory_csv(const Trajectory& t);

// key,value rows: theta_star, final_error, fitted_rate, log_drop, final_spread,
// eta bookkeeping and per-agent trigger statistics.
Rows report_rows(const ConvergenceReport& r, const Trajectory& t);
// agent,time,outcome with outcome "success" or "attacked"
std::string events_csv(const Trajectory& t);
// attack metrics over [0, horizon) and the budget checks when a budget is given
Rows condition_rows(const Scenario& s);
std::string rows_csv(const Rows& rows);

/// Writes to a sibling temporary file and renames it over the target.
/// Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

struct RunOutputs {
    std::string trajectory;
    std::string report;
    std::string events;
    std::string conditions;
};

RunOutputs write_run_outputs(const std::string& dir, const Scenario& s, const OutputSection& which,
                             const Trajectory& t, const ConvergenceReport& r);

}  // namespace resopt

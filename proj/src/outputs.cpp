#include "resopt/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "resopt/errors.hpp"

namespace resopt {

namespace fs = std::filesystem;

namespace {

void put_components(std::ostringstream& out, const std::string& name, int agent, Eigen::Index dim, bool always_suffix)
{
    for (Eigen::Index k = 0; k < dim; ++k) {
        out << ',' << name << agent;
        if (always_suffix || dim > 1) {
            out << '_' << (k + 1);
        }
    }
}

void put_values(std::ostringstream& out, const Eigen::VectorXd& v)
{
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out << ',' << format_number(v(k));
    }
}

}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

std::string trajectory_header(const Trajectory& t)
{
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 0; i < t.agents.size(); ++i) {
        const AgentSeries& a = t.agents[i];
        const int id = static_cast<int>(i) + 1;
        put_components(out, "x", id, a.x.front().size(), true);
        put_components(out, "y", id, a.y.front().size(), false);
        put_components(out, "rho", id, a.rho.front().size(), false);
        put_components(out, "z", id, a.z.front().size(), false);
        put_components(out, "u", id, a.u.front().size(), true);
        out << ",eta_g" << id << ",eta_h" << id;
    }
    out << ",r_state,attack_active";
    return out.str();
}

std::string trajectory_csv(const Trajectory& t)
{
    std::ostringstream out;
    out << trajectory_header(t) << '\n';
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        out << format_number(t.times[k]);
        for (const auto& a : t.agents) {
            put_values(out, a.x[k]);
            put_values(out, a.y[k]);
            put_values(out, a.rho[k]);
            put_values(out, a.z[k]);
            put_values(out, a.u[k]);
            out << ',' << format_number(a.eta_g[k]) << ',' << format_number(a.eta_h[k]);
        }
        out << ',' << (t.graph_state[k] + 1) << ',' << t.attack_active[k] << '\n';
    }
    return out.str();
}

Rows report_rows(const ConvergenceReport& r, const Trajectory& t)
{
    Rows rows;
    rows.emplace_back("algorithm", to_string(t.algorithm));
    for (Eigen::Index k = 0; k < r.theta_star.size(); ++k) {
        rows.emplace_back(r.theta_star.size() == 1 ? "theta_star" : "theta_star_" + std::to_string(k + 1),
                          format_number(r.theta_star(k)));
    }
    rows.emplace_back("final_error", format_number(r.final_error));
    rows.emplace_back("fitted_rate", format_number(r.fitted_rate));
    rows.emplace_back("log_drop", format_number(r.log_drop));
    rows.emplace_back("final_spread", format_number(r.final_spread));
    rows.emplace_back("converged", r.final_error < 1e-2 ? "true" : "false");
    rows.emplace_back("steps", std::to_string(t.steps));
    rows.emplace_back("graph_switches", std::to_string(t.path.breakpoints.size() - 1));
    if (t.algorithm == Algorithm::event_based) {
        rows.emplace_back("eta_min", format_number(t.eta_min));
        rows.emplace_back("eta_violations", std::to_string(t.eta_violations));
        const ZenoAudit z = zeno_audit(t);
        rows.emplace_back("zeno_audit", z.pass ? "pass" : "fail");
        for (std::size_t i = 0; i < r.trigger_stats.size(); ++i) {
            const AgentTriggerStats& s = r.trigger_stats[i];
            const std::string p = "agent" + std::to_string(i + 1) + "_";
            rows.emplace_back(p + "attempts", std::to_string(s.attempts));
            rows.emplace_back(p + "events", std::to_string(s.successes));
            rows.emplace_back(p + "attacked_attempts", std::to_string(s.attacked));
            rows.emplace_back(p + "min_gap", format_number(s.min_gap));
            rows.emplace_back(p + "mean_gap", format_number(s.mean_gap));
        }
    }
    return rows;
}

std::string events_csv(const Trajectory& t)
{
    std::ostringstream out;
    out << "agent,time,outcome\n";
    for (std::size_t i = 0; i < t.agents.size(); ++i) {
        for (const auto& a : t.agents[i].attempts) {
            out << (i + 1) << ',' << format_number(a.time) << ',' << (a.success ? "success" : "attacked") << '\n';
        }
    }
    return out.str();
}

Rows condition_rows(const Scenario& s)
{
    Rows rows;
    const double t2 = s.horizon;
    const AttackMetrics m = s.attacks.empty() ? AttackMetrics{} : attack_metrics(s.attacks, 0.0, t2);
    rows.emplace_back("window_start", format_number(0.0));
    rows.emplace_back("window_end", format_number(t2));
    rows.emplace_back("attack_count", std::to_string(m.count));
    rows.emplace_back("attack_total_duration", format_number(m.total_duration));
    rows.emplace_back("attack_frequency", format_number(m.frequency));
    if (!s.budget) {
        rows.emplace_back("budget", "none");
        return rows;
    }
    const bool event = s.algorithm == Algorithm::event_based;
    AttackSchedule sched = s.attacks.empty() ? AttackSchedule({}, t2) : s.attacks;
    const ConditionReport f = check_frequency_condition(sched, *s.budget, 0.0, t2, event);
    const ConditionReport d = check_duration_condition(sched, *s.budget, 0.0, t2, event);
    rows.emplace_back("event_variant", event ? "true" : "false");
    rows.emplace_back("frequency_threshold", format_number(f.threshold));
    rows.emplace_back("frequency_tightest", format_number(f.tightest));
    rows.emplace_back("frequency_pass", f.pass ? "true" : "false");
    rows.emplace_back("duration_threshold", format_number(d.threshold));
    rows.emplace_back("duration_tightest", format_number(d.tightest));
    rows.emplace_back("duration_pass", d.pass ? "true" : "false");
    return rows;
}

std::string rows_csv(const Rows& rows)
{
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [k, v] : rows) {
        out << k << ',' << v << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

RunOutputs write_run_outputs(const std::string& dir, const Scenario& s, const OutputSection& which,
                             const Trajectory& t, const ConvergenceReport& r)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir);
    }
    const fs::path base(dir);
    RunOutputs out;
    if (which.trajectory) {
        out.trajectory = (base / "trajectory.csv").string();
        write_file_atomic(out.trajectory, trajectory_csv(t));
    }
    if (which.report) {
        out.report = (base / "report.csv").string();
        write_file_atomic(out.report, rows_csv(report_rows(r, t)));
    }
    if (which.events && t.algorithm == Algorithm::event_based) {
        out.events = (base / "events.csv").string();
        write_file_atomic(out.events, events_csv(t));
    }
    if (which.conditions) {
        out.conditions = (base / "conditions.csv").string();
        write_file_atomic(out.conditions, rows_csv(condition_rows(s)));
    }
    return out;
}

}  // namespace resopt

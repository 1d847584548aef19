#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resopt/attack.hpp"
#include "resopt/controller.hpp"
#include "resopt/cost.hpp"
#include "resopt/graph.hpp"
#include "resopt/plant.hpp"

namespace resopt {

enum class Algorithm { attack_free, time_based, event_based };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct InitialStates {
    std::vector<Eigen::VectorXd> x;
    std::vector<Eigen::VectorXd> rho;
    std::vector<Eigen::VectorXd> z;
};

struct Scenario {
    std::string name;
    std::vector<AgentModel> agents;
    std::vector<CostSpec> costs;
    GraphProcess graph_process;
    AttackSchedule attacks;
    std::optional<AttackBudget> budget;
    Algorithm algorithm = Algorithm::time_based;
    AlgorithmParams params;
    TriggerParams trigger;
    double horizon = 0.0;
    double step = 1e-3;
    std::uint64_t seed = 1;
    int record_every = 10;
    // nullopt draws every component uniformly from [init_lo, init_hi]
    std::optional<InitialStates> initial;
    double init_lo = -10.0;
    double init_hi = 10.0;
    // non-fatal load findings (uncontrollable pairs, locally non-convex costs)
    std::vector<std::string> warnings;

    int num_agents() const { return static_cast<int>(agents.size()); }
    int output_dim() const { return agents.front().output_dim(); }
    /// Dimension and count checks plus the joint connectivity hypothesis
    /// (stationary_weighting must succeed).
    void validate() const;
};

/// Explicit initial states, or the seeded uniform draw (agent-major: x, rho, z).
InitialStates resolve_initial_states(const Scenario& s);

// Switching path used by run() for this scenario's seed.
SwitchingPath scenario_switching_path(const Scenario& s);

struct AttemptRecord {
    double time = 0.0;
    bool success = false;
};

struct AgentSeries {
    std::vector<Eigen::VectorXd> x, y, rho, z, u;
    std::vector<double> eta_g, eta_h;
    std::vector<AttemptRecord> attempts;  // event_based only

    std::vector<double> event_times() const;  // successful broadcasts
};

struct Trajectory {
    Algorithm algorithm = Algorithm::time_based;
    double step = 0.0;
    double horizon = 0.0;
    long steps = 0;
    std::vector<double> times;
    std::vector<AgentSeries> agents;
    std::vector<int> graph_state;    // 0-based mode index per record
    std::vector<int> attack_active;  // 0/1 per record
    SwitchingPath path;
    long eta_violations = 0;  // steps where some eta_g or eta_h was not positive
    double eta_min = 0.0;     // smallest eta_g or eta_h seen after any step
};

/// Fixed-step classical RK4 of the closed loop. Graph mode, attack activity and
/// all communicated values are sampled at grid points and held for the step;
/// each agent's own gradient is evaluated on its live output. Throws
/// DivergenceError when any state component is non-finite or exceeds 1e9.
Trajectory run(const Scenario& s);

struct AgentTriggerStats {
    int attempts = 0;
    int successes = 0;
    int attacked = 0;
    double min_gap = 0.0;   // between consecutive attempts, +inf with fewer than two
    double mean_gap = 0.0;
};

struct ConvergenceReport {
    Eigen::VectorXd theta_star;
    double final_error = 0.0;                       // max_i |y_i(T) - theta*|
    std::vector<std::vector<double>> error_series;  // ln max(|y_i - theta*|, 1e-15)
    std::vector<double> log_envelope;               // ln of the max over agents
    double fitted_rate = 0.0;  // least-squares slope of log_envelope over the last 80% of the horizon
    double log_drop = 0.0;     // peak of log_envelope minus its final value
    double final_spread = 0.0;  // max_{i,j} |y_i(T) - y_j(T)|
    std::vector<AgentTriggerStats> trigger_stats;
};

ConvergenceReport convergence_report(const Trajectory& t, const Eigen::VectorXd& theta_star);

// max_{i,j} |y_i - y_j| at record k
double output_spread(const Trajectory& t, std::size_t k);
// max_i |y_i - theta*| at the first record not before `time`
double error_at(const Trajectory& t, const Eigen::VectorXd& theta_star, double time);

struct BetaResult {
    double beta = 0.0;
    double error = 0.0;
};

/// Runs the scenario once per beta (concurrently) and returns the results
/// ordered by the error at probe_time, ties kept in input order.
std::vector<BetaResult> compare_beta_sweep(const Scenario& base, const std::vector<double>& betas,
                                           double probe_time);

struct ZenoAudit {
    bool applicable = false;
    std::vector<int> event_counts;  // attempts per agent
    std::vector<double> min_gap;
    bool pass = false;
};

// Grid-limited: passes iff every inter-attempt gap is at least one step.
ZenoAudit zeno_audit(const Trajectory& t);

}  // namespace resopt

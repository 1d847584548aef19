#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "resopt/sim.hpp"

namespace resopt {

struct AgentEntry {
    Eigen::MatrixXd A, B, C, K;
    std::optional<RegulatorSolution> pinned;
};

struct PeriodicAttack {
    double period = 0.0;
    double active = 0.0;
    double phase = 0.0;
};

struct AttackSection {
    std::vector<AttackInterval> intervals;
    std::optional<PeriodicAttack> periodic;
    std::optional<AttackBudget> budget;
};

struct SimSection {
    double horizon = 0.0;
    double step = 1e-3;
    std::uint64_t seed = 1;
    int record_every = 10;
    std::optional<InitialStates> initial;  // nullopt = "random"
    double init_lo = -10.0;
    double init_hi = 10.0;
};

struct OutputSection {
    bool trajectory = true;
    bool report = true;
    bool events = true;
    bool conditions = true;
};

/// In-memory form of a scenario document. Matrices are row-major nested
/// arrays in JSON; every object rejects keys it does not know.
struct ScenarioFile {
    std::string name;
    std::vector<AgentEntry> agents;
    std::vector<CostSpec> costs;
    std::vector<Eigen::MatrixXd> graphs;
    Eigen::MatrixXd generator;
    Eigen::VectorXd initial_distribution;
    AttackSection attacks;
    Algorithm algorithm = Algorithm::time_based;
    AlgorithmParams params;
    TriggerParams trigger;
    SimSection sim;
    OutputSection outputs;
};

nlohmann::json to_json(const ScenarioFile& f);
/// Schema check with the offending JSON path in every message.
ScenarioFile scenario_file_from_json(const nlohmann::json& j);

/// Builds and validates the runtime scenario: agent invariants, graph process,
/// attack schedule, team convexity and joint connectivity.
Scenario build_scenario(const ScenarioFile& f);

/// Sets a dotted key ("params.beta", "costs.0.params") to a JSON-parsed value.
/// "attacks.duty" rescales the periodic template's active time to
/// duty * period.
void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value);
// "key=value" form
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json read_json_file(const std::string& path);
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

std::vector<std::string> preset_names();
// case1, case2 or case3; throws ValidationError for anything else
ScenarioFile preset(const std::string& name);

}  // namespace resopt

#include "resopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "resopt/errors.hpp"

namespace resopt {

using nlohmann::json;

namespace {

// ---- reading -------------------------------------------------------------

std::string child(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t index)
{
    return path + "[" + std::to_string(index) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ValidationError((path.empty() ? std::string("scenario") : path) + ": " + msg);
}

const json& object_at(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            fail(child(path, key), "unknown key");
        }
    }
    return j;
}

const json& require(const json& obj, const std::string& path, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(child(path, key), "missing required key");
    }
    return *it;
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(path, "must be finite");
    }
    return v;
}

double number_at(const json& obj, const std::string& path, const char* key)
{
    return number(require(obj, path, key), child(path, key));
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback)
{
    return obj.contains(key) ? number(obj.at(key), child(path, key)) : fallback;
}

std::optional<double> optional_number(const json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    return number(obj.at(key), child(path, key));
}

bool boolean_or(const json& obj, const std::string& path, const char* key, bool fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_boolean()) {
        fail(child(path, key), "expected true or false");
    }
    return obj.at(key).get<bool>();
}

std::vector<double> number_list(const json& j, const std::string& path)
{
    if (!j.is_array()) {
        fail(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(number(j[k], child(path, k)));
    }
    return out;
}

Eigen::VectorXd vector_of(const json& j, const std::string& path)
{
    const auto v = number_list(j, path);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_of(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) {
        fail(path, "expected a nonempty array of rows");
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = number_list(j[r], child(path, r));
        if (r == 0) {
            cols = row.size();
            if (cols == 0) {
                fail(path, "rows must be nonempty");
            }
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            fail(child(path, r), "row has " + std::to_string(row.size()) + " entries, expected " +
                                     std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
    }
    return m;
}

std::vector<Eigen::VectorXd> vector_list(const json& j, const std::string& path)
{
    if (!j.is_array()) {
        fail(path, "expected an array of per-agent vectors");
    }
    std::vector<Eigen::VectorXd> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(vector_of(j[k], child(path, k)));
    }
    return out;
}

AgentEntry read_agent(const json& j, const std::string& path)
{
    object_at(j, path, {"A", "B", "C", "K", "U", "W", "X"});
    AgentEntry a;
    a.A = matrix_of(require(j, path, "A"), child(path, "A"));
    a.B = matrix_of(require(j, path, "B"), child(path, "B"));
    a.C = matrix_of(require(j, path, "C"), child(path, "C"));
    a.K = matrix_of(require(j, path, "K"), child(path, "K"));
    const int pinned = static_cast<int>(j.contains("U")) + static_cast<int>(j.contains("W")) +
                       static_cast<int>(j.contains("X"));
    if (pinned == 3) {
        a.pinned = RegulatorSolution{matrix_of(j.at("U"), child(path, "U")), matrix_of(j.at("W"), child(path, "W")),
                                     matrix_of(j.at("X"), child(path, "X"))};
    } else if (pinned != 0) {
        fail(path, "pin all of U, W, X or none of them");
    }
    return a;
}

CostSpec read_cost(const json& j, const std::string& path)
{
    object_at(j, path, {"kind", "params", "dimension", "box"});
    CostSpec c;
    const json& kind = require(j, path, "kind");
    if (!kind.is_string()) {
        fail(child(path, "kind"), "expected a string");
    }
    try {
        c.kind = cost_kind_from_string(kind.get<std::string>());
    } catch (const ValidationError& e) {
        fail(child(path, "kind"), e.what());
    }
    c.params = number_list(require(j, path, "params"), child(path, "params"));
    if (j.contains("dimension")) {
        const json& d = j.at("dimension");
        if (!d.is_number_integer() || d.get<long>() < 1) {
            fail(child(path, "dimension"), "expected a positive integer");
        }
        c.dimension = d.get<int>();
    }
    if (j.contains("box")) {
        const auto box = number_list(j.at("box"), child(path, "box"));
        if (box.size() != 2) {
            fail(child(path, "box"), "expected [lo, hi]");
        }
        c.box_lo = box[0];
        c.box_hi = box[1];
    }
    try {
        c.validate();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    return c;
}

AttackBudget read_budget(const json& j, const std::string& path)
{
    object_at(j, path, {"lambda_a", "lambda_b", "mu", "eta_star", "t_f_star", "t_a_star", "n0", "t0", "kappa_star"});
    AttackBudget b;
    b.lambda_a = optional_number(j, path, "lambda_a");
    b.lambda_b = optional_number(j, path, "lambda_b");
    b.mu = optional_number(j, path, "mu");
    b.eta_star = optional_number(j, path, "eta_star");
    b.t_f_star = optional_number(j, path, "t_f_star");
    b.t_a_star = optional_number(j, path, "t_a_star");
    b.n0 = number_or(j, path, "n0", b.n0);
    b.t0 = number_or(j, path, "t0", b.t0);
    b.kappa_star = number_or(j, path, "kappa_star", b.kappa_star);
    try {
        b.validate();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    return b;
}

AttackSection read_attacks(const json& j, const std::string& path)
{
    object_at(j, path, {"intervals", "periodic", "budget"});
    AttackSection a;
    if (j.contains("intervals") && j.contains("periodic")) {
        fail(path, "give either intervals or periodic, not both");
    }
    if (j.contains("intervals")) {
        const json& list = j.at("intervals");
        const std::string lp = child(path, "intervals");
        if (!list.is_array()) {
            fail(lp, "expected an array of [start, duration] pairs");
        }
        for (std::size_t k = 0; k < list.size(); ++k) {
            const auto pair = number_list(list[k], child(lp, k));
            if (pair.size() != 2) {
                fail(child(lp, k), "expected [start, duration]");
            }
            a.intervals.push_back({pair[0], pair[1]});
        }
    }
    if (j.contains("periodic")) {
        const std::string pp = child(path, "periodic");
        const json& p = object_at(j.at("periodic"), pp, {"period", "active", "phase"});
        a.periodic = PeriodicAttack{number_at(p, pp, "period"), number_at(p, pp, "active"),
                                    number_or(p, pp, "phase", 0.0)};
    }
    if (j.contains("budget")) {
        a.budget = read_budget(j.at("budget"), child(path, "budget"));
    }
    return a;
}

TriggerParams read_trigger(const json& j, const std::string& path)
{
    object_at(j, path,
              {"sigma_g", "sigma_h", "theta_g", "theta_h", "delta_g", "delta_h", "k_g", "k_h", "eta_g0", "eta_h0",
               "dwell_kappa"});
    TriggerParams t;
    t.sigma_g = number_or(j, path, "sigma_g", t.sigma_g);
    t.sigma_h = number_or(j, path, "sigma_h", t.sigma_h);
    t.theta_g = number_or(j, path, "theta_g", t.theta_g);
    t.theta_h = number_or(j, path, "theta_h", t.theta_h);
    t.delta_g = number_or(j, path, "delta_g", t.delta_g);
    t.delta_h = number_or(j, path, "delta_h", t.delta_h);
    t.k_g = number_or(j, path, "k_g", t.k_g);
    t.k_h = number_or(j, path, "k_h", t.k_h);
    t.eta_g0 = number_or(j, path, "eta_g0", t.eta_g0);
    t.eta_h0 = number_or(j, path, "eta_h0", t.eta_h0);
    t.dwell_kappa = number_or(j, path, "dwell_kappa", t.dwell_kappa);
    try {
        t.validate();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    return t;
}

SimSection read_sim(const json& j, const std::string& path)
{
    object_at(j, path, {"horizon", "step", "seed", "record_every", "initial_states", "init_range"});
    SimSection s;
    s.horizon = number_at(j, path, "horizon");
    s.step = number_at(j, path, "step");
    if (!(s.step > 0.0)) {
        fail(child(path, "step"), "must be positive");
    }
    if (!(s.horizon >= s.step)) {
        fail(child(path, "horizon"), "must be at least one step");
    }
    if (j.contains("seed")) {
        const json& sd = j.at("seed");
        if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<long long>() >= 0)) {
            fail(child(path, "seed"), "expected a nonnegative integer");
        }
        s.seed = sd.get<std::uint64_t>();
    }
    if (j.contains("record_every")) {
        const json& r = j.at("record_every");
        if (!r.is_number_integer() || r.get<long>() < 1) {
            fail(child(path, "record_every"), "expected a positive integer");
        }
        s.record_every = r.get<int>();
    }
    if (j.contains("initial_states")) {
        const json& init = j.at("initial_states");
        const std::string ip = child(path, "initial_states");
        if (init.is_string()) {
            if (init.get<std::string>() != "random") {
                fail(ip, "expected \"random\" or an object with x, rho, z");
            }
        } else {
            object_at(init, ip, {"x", "rho", "z"});
            s.initial = InitialStates{vector_list(require(init, ip, "x"), child(ip, "x")),
                                      vector_list(require(init, ip, "rho"), child(ip, "rho")),
                                      vector_list(require(init, ip, "z"), child(ip, "z"))};
        }
    }
    if (j.contains("init_range")) {
        const auto r = number_list(j.at("init_range"), child(path, "init_range"));
        if (r.size() != 2 || !(r[0] <= r[1])) {
            fail(child(path, "init_range"), "expected [lo, hi] with lo <= hi");
        }
        s.init_lo = r[0];
        s.init_hi = r[1];
    }
    return s;
}

// ---- writing -------------------------------------------------------------

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v(k));
    }
    return out;
}

json vector_list_json(const std::vector<Eigen::VectorXd>& vs)
{
    json out = json::array();
    for (const auto& v : vs) {
        out.push_back(vector_json(v));
    }
    return out;
}

// ---- presets -------------------------------------------------------------

// Coupling weight on every drawn edge of the bundled digraphs.
constexpr double kEdgeWeight = 16.0;

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> init)
{
    const auto r = static_cast<Eigen::Index>(init.size());
    const auto c = static_cast<Eigen::Index>(init.begin()->size());
    Eigen::MatrixXd m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : init) {
        Eigen::Index j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

ScenarioFile example_base()
{
    ScenarioFile f;
    f.agents.push_back({rows({{0, 1}, {0, 0}}), rows({{0, 1}, {1, -2}}), rows({{1, 1}}), rows({{3, 5}, {1.5, 1}}),
                        RegulatorSolution{rows({{1}, {0.5}}), rows({{1.5}, {0.5}}), rows({{0.5}, {0.5}})}});
    f.agents.push_back({rows({{0, -1}, {1, -2}}), rows({{1, 0}, {3, -1}}), rows({{-1, 1}}),
                        rows({{0.75, -1}, {1.25, -4}}),
                        RegulatorSolution{rows({{-0.5}, {0}}), rows({{-0.5}, {-2}}), rows({{-0.5}, {0.5}})}});
    f.agents.push_back({rows({{0, 1, 0}, {0, 0, 1}, {0.5, 1, -2}}), rows({{1, 0}, {0, 1}, {1, 0}}),
                        rows({{1, -1, 1}}), rows({{2.167, 1, 0.333}, {0, 3, 1}}),
                        RegulatorSolution{rows({{-1}, {0}}), rows({{0}, {-1}}), rows({{0}, {-1}, {0}})}});

    // f1 with a positive first term
    f.costs.push_back({CostKind::exp_pair, {2.0, -0.5, 0.5, 0.3}, 1, -10.0, 10.0});
    f.costs.push_back({CostKind::quartic, {1.0, 2.0, 2.0}, 1, -10.0, 10.0});
    f.costs.push_back({CostKind::log_quadratic, {0.5, 1.0}, 1, -10.0, 10.0});

    // weights(i, j) > 0 means agent i listens to agent j
    const double w = kEdgeWeight;
    f.graphs.push_back(rows({{0, 0, w}, {w, 0, 0}, {0, w, 0}}));  // 1 -> 2 -> 3 -> 1
    f.graphs.push_back(rows({{0, w, 0}, {0, 0, w}, {w, 0, 0}}));  // 1 -> 3 -> 2 -> 1
    f.graphs.push_back(rows({{0, w, 0}, {w, 0, w}, {0, w, 0}}));  // 1 <-> 2 <-> 3
    f.generator = rows({{-0.1, 0.02, 0.08}, {0.3, -0.5, 0.2}, {0.1, 0.1, -0.2}});
    // exact stationary law of the generator
    f.initial_distribution = Eigen::Vector3d(10.0 / 17.0, 3.0 / 34.0, 11.0 / 34.0);

    f.params = AlgorithmParams{2.0, 1.0};
    f.sim.step = 1e-3;
    f.sim.seed = 1;
    f.sim.record_every = 10;
    return f;
}

AttackBudget example_budget()
{
    AttackBudget b;
    b.t_f_star = 50.0;
    b.t_a_star = 2.0;
    b.n0 = 1.0;
    b.t0 = 3.0;
    b.kappa_star = 0.1;
    return b;
}

}  // namespace

json to_json(const ScenarioFile& f)
{
    json j;
    j["name"] = f.name;
    json agents = json::array();
    for (const auto& a : f.agents) {
        json e{{"A", matrix_json(a.A)}, {"B", matrix_json(a.B)}, {"C", matrix_json(a.C)}, {"K", matrix_json(a.K)}};
        if (a.pinned) {
            e["U"] = matrix_json(a.pinned->U);
            e["W"] = matrix_json(a.pinned->W);
            e["X"] = matrix_json(a.pinned->X);
        }
        agents.push_back(e);
    }
    j["agents"] = agents;

    json costs = json::array();
    for (const auto& c : f.costs) {
        costs.push_back({{"kind", to_string(c.kind)},
                         {"params", c.params},
                         {"dimension", c.dimension},
                         {"box", {c.box_lo, c.box_hi}}});
    }
    j["costs"] = costs;

    json graphs = json::array();
    for (const auto& g : f.graphs) {
        graphs.push_back(matrix_json(g));
    }
    j["graph_process"] = {{"graphs", graphs},
                          {"generator", matrix_json(f.generator)},
                          {"initial_distribution", vector_json(f.initial_distribution)}};

    json attacks = json::object();
    if (f.attacks.periodic) {
        attacks["periodic"] = {{"period", f.attacks.periodic->period},
                               {"active", f.attacks.periodic->active},
                               {"phase", f.attacks.periodic->phase}};
    } else {
        json list = json::array();
        for (const auto& iv : f.attacks.intervals) {
            list.push_back({iv.start, iv.duration});
        }
        attacks["intervals"] = list;
    }
    if (f.attacks.budget) {
        const AttackBudget& b = *f.attacks.budget;
        json bj = json::object();
        auto put = [&bj](const char* key, const std::optional<double>& v) {
            if (v) {
                bj[key] = *v;
            }
        };
        put("lambda_a", b.lambda_a);
        put("lambda_b", b.lambda_b);
        put("mu", b.mu);
        put("eta_star", b.eta_star);
        put("t_f_star", b.t_f_star);
        put("t_a_star", b.t_a_star);
        bj["n0"] = b.n0;
        bj["t0"] = b.t0;
        bj["kappa_star"] = b.kappa_star;
        attacks["budget"] = bj;
    }
    j["attacks"] = attacks;

    j["algorithm"] = to_string(f.algorithm);
    const TriggerParams& t = f.trigger;
    j["params"] = {{"alpha", f.params.alpha},
                   {"beta", f.params.beta},
                   {"trigger",
                    {{"sigma_g", t.sigma_g},
                     {"sigma_h", t.sigma_h},
                     {"theta_g", t.theta_g},
                     {"theta_h", t.theta_h},
                     {"delta_g", t.delta_g},
                     {"delta_h", t.delta_h},
                     {"k_g", t.k_g},
                     {"k_h", t.k_h},
                     {"eta_g0", t.eta_g0},
                     {"eta_h0", t.eta_h0},
                     {"dwell_kappa", t.dwell_kappa}}}};

    json sim{{"horizon", f.sim.horizon},
             {"step", f.sim.step},
             {"seed", f.sim.seed},
             {"record_every", f.sim.record_every},
             {"init_range", {f.sim.init_lo, f.sim.init_hi}}};
    if (f.sim.initial) {
        sim["initial_states"] = {{"x", vector_list_json(f.sim.initial->x)},
                                 {"rho", vector_list_json(f.sim.initial->rho)},
                                 {"z", vector_list_json(f.sim.initial->z)}};
    } else {
        sim["initial_states"] = "random";
    }
    j["sim"] = sim;
    j["outputs"] = {{"trajectory", f.outputs.trajectory},
                    {"report", f.outputs.report},
                    {"events", f.outputs.events},
                    {"conditions", f.outputs.conditions}};
    return j;
}

ScenarioFile scenario_file_from_json(const json& j)
{
    object_at(j, "", {"name", "agents", "costs", "graph_process", "attacks", "algorithm", "params", "sim", "outputs"});
    ScenarioFile f;
    if (j.contains("name")) {
        if (!j.at("name").is_string()) {
            fail("name", "expected a string");
        }
        f.name = j.at("name").get<std::string>();
    }

    const json& agents = require(j, "", "agents");
    if (!agents.is_array() || agents.empty()) {
        fail("agents", "expected a nonempty array");
    }
    for (std::size_t k = 0; k < agents.size(); ++k) {
        f.agents.push_back(read_agent(agents[k], child("agents", k)));
    }

    const json& costs = require(j, "", "costs");
    if (!costs.is_array()) {
        fail("costs", "expected an array");
    }
    for (std::size_t k = 0; k < costs.size(); ++k) {
        f.costs.push_back(read_cost(costs[k], child("costs", k)));
    }

    const json& gp = object_at(require(j, "", "graph_process"), "graph_process",
                               {"graphs", "generator", "initial_distribution"});
    const json& graphs = require(gp, "graph_process", "graphs");
    if (!graphs.is_array() || graphs.empty()) {
        fail("graph_process.graphs", "expected a nonempty array of weight matrices");
    }
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        f.graphs.push_back(matrix_of(graphs[k], child("graph_process.graphs", k)));
    }
    f.generator = matrix_of(require(gp, "graph_process", "generator"), "graph_process.generator");
    f.initial_distribution =
        vector_of(require(gp, "graph_process", "initial_distribution"), "graph_process.initial_distribution");

    if (j.contains("attacks")) {
        f.attacks = read_attacks(j.at("attacks"), "attacks");
    }

    if (j.contains("algorithm")) {
        if (!j.at("algorithm").is_string()) {
            fail("algorithm", "expected a string");
        }
        try {
            f.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
        } catch (const ValidationError& e) {
            fail("algorithm", e.what());
        }
    }

    if (j.contains("params")) {
        const json& p = object_at(j.at("params"), "params", {"alpha", "beta", "trigger"});
        f.params.alpha = number_or(p, "params", "alpha", f.params.alpha);
        f.params.beta = number_or(p, "params", "beta", f.params.beta);
        try {
            f.params.validate();
        } catch (const ValidationError& e) {
            fail("params", e.what());
        }
        if (p.contains("trigger")) {
            f.trigger = read_trigger(p.at("trigger"), "params.trigger");
        }
    }

    f.sim = read_sim(require(j, "", "sim"), "sim");

    if (j.contains("outputs")) {
        const json& o = object_at(j.at("outputs"), "outputs", {"trajectory", "report", "events", "conditions"});
        f.outputs.trajectory = boolean_or(o, "outputs", "trajectory", true);
        f.outputs.report = boolean_or(o, "outputs", "report", true);
        f.outputs.events = boolean_or(o, "outputs", "events", true);
        f.outputs.conditions = boolean_or(o, "outputs", "conditions", true);
    }
    return f;
}

Scenario build_scenario(const ScenarioFile& f)
{
    std::vector<std::string> warnings;
    std::vector<AgentModel> agents;
    for (std::size_t k = 0; k < f.agents.size(); ++k) {
        const AgentEntry& a = f.agents[k];
        try {
            agents.emplace_back(a.A, a.B, a.C, a.K, a.pinned);
        } catch (const std::exception& e) {
            fail(child("agents", k), e.what());
        }
        for (const auto& w : agents.back().warnings()) {
            warnings.push_back(child("agents", k) + ": " + w);
        }
    }

    if (f.costs.size() != f.agents.size()) {
        fail("costs", "expected one cost per agent (" + std::to_string(f.agents.size()) + "), got " +
                          std::to_string(f.costs.size()));
    }
    for (std::size_t k = 0; k < f.costs.size(); ++k) {
        try {
            estimate_regularity(f.costs[k]);
        } catch (const ConvexityViolated& e) {
            warnings.push_back(child("costs", k) + ": " + e.what());
        }
    }
    // The team cost must be strongly convex on the intersection of the boxes.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& c : f.costs) {
        lo = std::max(lo, c.box_lo);
        hi = std::min(hi, c.box_hi);
    }
    if (!(lo < hi)) {
        fail("costs", "working boxes do not overlap");
    }
    constexpr int kTeamGrid = 10000;
    for (int k = 0; k <= kTeamGrid; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) / kTeamGrid;
        double curv = 0.0;
        for (const auto& c : f.costs) {
            curv += scalar_curvature(c, t);
        }
        if (!(curv > 0.0)) {
            fail("costs", "team cost has curvature " + std::to_string(curv) + " at " + std::to_string(t) +
                              "; the sum of costs must be strongly convex");
        }
    }
    try {
        centralized_optimum(f.costs);
    } catch (const UnboundedError& e) {
        fail("costs", e.what());
    }

    std::vector<WeightedDigraph> graphs;
    for (std::size_t k = 0; k < f.graphs.size(); ++k) {
        try {
            graphs.emplace_back(f.graphs[k]);
        } catch (const ValidationError& e) {
            fail(child("graph_process.graphs", k), e.what());
        }
    }
    std::optional<GraphProcess> gp;
    try {
        gp.emplace(std::move(graphs), f.generator, f.initial_distribution);
    } catch (const ValidationError& e) {
        fail("graph_process", e.what());
    }
    try {
        stationary_weighting(*gp);
    } catch (const AssumptionViolated& e) {
        fail("graph_process", e.what());
    }

    AttackSchedule schedule;
    try {
        if (f.attacks.periodic) {
            const auto& p = *f.attacks.periodic;
            schedule = AttackSchedule::periodic(p.period, p.active, p.phase, f.sim.horizon);
        } else {
            schedule = AttackSchedule(f.attacks.intervals, f.sim.horizon);
        }
    } catch (const ValidationError& e) {
        fail("attacks", e.what());
    }

    Scenario s{.name = f.name,
               .agents = std::move(agents),
               .costs = f.costs,
               .graph_process = std::move(*gp),
               .attacks = std::move(schedule),
               .budget = f.attacks.budget,
               .algorithm = f.algorithm,
               .params = f.params,
               .trigger = f.trigger,
               .horizon = f.sim.horizon,
               .step = f.sim.step,
               .seed = f.sim.seed,
               .record_every = f.sim.record_every,
               .initial = f.sim.initial,
               .init_lo = f.sim.init_lo,
               .init_hi = f.sim.init_hi,
               .warnings = std::move(warnings)};
    try {
        s.validate();
    } catch (const ValidationError& e) {
        fail("", e.what());
    }
    return s;
}

void apply_override(json& doc, const std::string& key, const std::string& value)
{
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }

    if (key == "attacks.duty") {
        if (!parsed.is_number()) {
            throw ValidationError("override attacks.duty: expected a number");
        }
        if (!doc.contains("attacks") || !doc["attacks"].contains("periodic")) {
            throw ValidationError("override attacks.duty needs a periodic attack template");
        }
        json& p = doc["attacks"]["periodic"];
        if (!p.contains("period") || !p["period"].is_number()) {
            throw ValidationError("override attacks.duty: periodic template has no period");
        }
        p["active"] = parsed.get<double>() * p["period"].get<double>();
        return;
    }

    json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            throw ValidationError("override key '" + key + "' has an empty segment");
        }
        parts.push_back(part);
    }
    if (parts.empty()) {
        throw ValidationError("empty override key");
    }
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const std::string& p = parts[k];
        const bool leaf = k + 1 == parts.size();
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(p, &used);
                if (used != p.size()) {
                    throw std::invalid_argument(p);
                }
            } catch (const std::exception&) {
                throw ValidationError("override key '" + key + "': '" + p + "' is not an array index");
            }
            if (idx >= node->size()) {
                throw ValidationError("override key '" + key + "': index " + p + " out of range");
            }
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!leaf && !node->contains(p)) {
                (*node)[p] = json::object();
            }
            node = &(*node)[p];
        } else {
            throw ValidationError("override key '" + key + "': '" + p + "' does not name a container");
        }
    }
    *node = parsed;
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override '" + assignment + "' is not of the form key=value");
    }
    apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides)
{
    json doc = read_json_file(path);
    for (const auto& o : overrides) {
        apply_override(doc, o);
    }
    return build_scenario(scenario_file_from_json(doc));
}

std::vector<std::string> preset_names()
{
    return {"case1", "case2", "case3"};
}

ScenarioFile preset(const std::string& name)
{
    ScenarioFile f = example_base();
    f.name = name;
    if (name == "case1") {
        f.algorithm = Algorithm::time_based;
        f.sim.horizon = 30.0;
        return f;
    }
    if (name == "case2" || name == "case3") {
        f.algorithm = name == "case2" ? Algorithm::time_based : Algorithm::event_based;
        f.sim.horizon = 100.0;
        f.attacks.periodic = PeriodicAttack{100.0, 3.0, 30.0};
        f.attacks.budget = example_budget();
        f.trigger.theta_g = 1e-4;
        f.trigger.theta_h = 1e-4;
        f.trigger.delta_g = 0.1;
        f.trigger.delta_h = 0.1;
        return f;
    }
    throw ValidationError("unknown preset '" + name + "' (expected case1, case2 or case3)");
}

}  // namespace resopt

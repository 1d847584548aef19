#include <exception>
#include <filesystem>
#include <cstdint>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resopt/errors.hpp"
#include "resopt/outputs.hpp"
#include "resopt/scenario.hpp"
#include "resopt/sim.hpp"

namespace fs = std::filesystem;
using namespace resopt;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct Loaded {
    ScenarioFile file;
    Scenario scenario;
};

Loaded load(const std::string& path, std::vector<std::string> overrides)
{
    nlohmann::json doc = read_json_file(path);
    for (const auto& o : overrides) {
        apply_override(doc, o);
    }
    ScenarioFile f = scenario_file_from_json(doc);
    Scenario s = build_scenario(f);
    return {std::move(f), std::move(s)};
}

void print_warnings(const Scenario& s)
{
    for (const auto& w : s.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

struct RunSummary {
    ConvergenceReport report;
    RunOutputs files;
};

RunSummary run_and_write(const Loaded& l, const std::string& out_dir)
{
    const Trajectory t = run(l.scenario);
    const ConvergenceReport r = convergence_report(t, centralized_optimum(l.scenario.costs));
    return {r, write_run_outputs(out_dir, l.scenario, l.file.outputs, t, r)};
}

int cmd_run(const std::string& path, const std::string& out, const std::vector<std::string>& sets,
            const std::optional<std::uint64_t>& seed)
{
    std::vector<std::string> overrides;
    if (seed) {
        overrides.push_back("sim.seed=" + std::to_string(*seed));
    }
    overrides.insert(overrides.end(), sets.begin(), sets.end());
    const Loaded l = load(path, overrides);
    print_warnings(l.scenario);
    const RunSummary s = run_and_write(l, out);
    std::cout << "scenario     " << l.scenario.name << " (" << to_string(l.scenario.algorithm) << ", seed "
              << l.scenario.seed << ")\n"
              << "theta_star   " << format_number(s.report.theta_star(0)) << '\n'
              << "final_error  " << format_number(s.report.final_error) << '\n'
              << "fitted_rate  " << format_number(s.report.fitted_rate) << '\n'
              << "final_spread " << format_number(s.report.final_spread) << '\n';
    for (const auto* p : {&s.files.trajectory, &s.files.report, &s.files.events, &s.files.conditions}) {
        if (!p->empty()) {
            std::cout << "wrote " << *p << '\n';
        }
    }
    return 0;
}

int cmd_preset(const std::string& name, const std::string& out)
{
    const ScenarioFile f = preset(name);
    build_scenario(f);
    write_file_atomic(out, to_json(f).dump(2) + "\n");
    std::cout << "wrote " << out << '\n';
    return 0;
}

std::vector<std::string> split_values(const std::string& csv)
{
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    if (out.empty()) {
        throw ValidationError("--values needs at least one value");
    }
    return out;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values,
              const std::string& out, const std::vector<std::string>& sets)
{
    const std::string key = param.find('.') == std::string::npos ? "params." + param : param;
    const auto vals = split_values(values);

    std::vector<Loaded> runs;
    for (const auto& v : vals) {
        std::vector<std::string> overrides = sets;
        overrides.push_back(key + "=" + v);
        runs.push_back(load(path, overrides));
    }
    std::vector<std::future<RunSummary>> jobs;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const std::string dir = (fs::path(out) / (param + "=" + vals[k])).string();
        jobs.push_back(std::async(std::launch::async, [&runs, k, dir] { return run_and_write(runs[k], dir); }));
    }

    std::ostringstream merged;
    merged << "param,value,final_error,fitted_rate,final_spread\n";
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const RunSummary s = jobs[k].get();
        merged << param << ',' << vals[k] << ',' << format_number(s.report.final_error) << ','
               << format_number(s.report.fitted_rate) << ',' << format_number(s.report.final_spread) << '\n';
    }
    fs::create_directories(out);
    const std::string summary = (fs::path(out) / "sweep.csv").string();
    write_file_atomic(summary, merged.str());
    std::cout << merged.str() << "wrote " << summary << '\n';
    return 0;
}

int cmd_check(const std::string& path, const std::vector<std::string>& sets)
{
    const Loaded l = load(path, sets);
    print_warnings(l.scenario);
    const Scenario& s = l.scenario;
    const StationaryWeighting sw = stationary_weighting(s.graph_process);
    std::cout << "scenario " << s.name << ": valid, " << s.num_agents() << " agents, " << s.graph_process.num_modes()
              << " graphs, algorithm " << to_string(s.algorithm) << '\n';
    std::cout << "min_cut," << format_number(sw.min_cut) << '\n';
    for (Eigen::Index k = 0; k < sw.pi.size(); ++k) {
        std::cout << "pi_" << (k + 1) << ',' << format_number(sw.pi(k)) << '\n';
    }
    std::cout << "theta_star," << format_number(centralized_optimum(s.costs)(0)) << '\n';
    for (std::size_t i = 0; i < s.costs.size(); ++i) {
        try {
            const RegularityEstimate r = estimate_regularity(s.costs[i]);
            std::cout << "cost" << (i + 1) << "_iota," << format_number(r.iota) << '\n'
                      << "cost" << (i + 1) << "_lipschitz," << format_number(r.lipschitz) << '\n';
        } catch (const ConvexityViolated&) {
            std::cout << "cost" << (i + 1) << "_iota,not_convex\n";
        }
    }
    for (const auto& [k, v] : condition_rows(s)) {
        std::cout << k << ',' << v << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Resilient distributed optimization simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write CSV outputs");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out, "output directory")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override sim.seed");
    run_cmd->add_option("--set", sets, "override key=value (repeatable)");

    std::string preset_name;
    auto* preset_cmd = app.add_subcommand("preset", "write a bundled scenario");
    preset_cmd->add_option("name", preset_name, "case1, case2 or case3")->required();
    preset_cmd->add_option("--out", out, "output file")->required();

    std::string param;
    std::string values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run one scenario for several parameter values");
    sweep_cmd->add_option("--param", param, "parameter key, e.g. beta or sim.step")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->required();
    sweep_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sweep_cmd->add_option("--out", out, "output directory")->required();
    sweep_cmd->add_option("--set", sets, "override key=value (repeatable)");

    auto* check_cmd = app.add_subcommand("check", "validate a scenario and print the attack budget checks");
    check_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    check_cmd->add_option("--set", sets, "override key=value (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            std::optional<std::uint64_t> s;
            if (*seed_opt) {
                s = seed;
            }
            return cmd_run(scenario_path, out, sets, s);
        }
        if (*preset_cmd) {
            return cmd_preset(preset_name, out);
        }
        if (*sweep_cmd) {
            return cmd_sweep(scenario_path, param, values, out, sets);
        }
        if (*check_cmd) {
            return cmd_check(scenario_path, sets);
        }
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}

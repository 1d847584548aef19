#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "resopt/cost.hpp"
#include "resopt/graph.hpp"
#include "resopt/plant.hpp"
#include "resopt/scenario.hpp"
#include "resopt/sim.hpp"

namespace testing_support {

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> init)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(init.size()), static_cast<Eigen::Index>(init.begin()->size()));
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

inline Eigen::VectorXd vec(std::initializer_list<double> init)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(init.size()));
    Eigen::Index i = 0;
    for (double x : init) {
        v(i++) = x;
    }
    return v;
}

// The three agents of the numerical example, typed in independently of the presets.
struct ExampleAgent {
    Eigen::MatrixXd A, B, C, K, U, W, X;
};

inline std::vector<ExampleAgent> example_agents()
{
    return {
        {mat({{0, 1}, {0, 0}}), mat({{0, 1}, {1, -2}}), mat({{1, 1}}), mat({{3, 5}, {1.5, 1}}), mat({{1}, {0.5}}),
         mat({{1.5}, {0.5}}), mat({{0.5}, {0.5}})},
        {mat({{0, -1}, {1, -2}}), mat({{1, 0}, {3, -1}}), mat({{-1, 1}}), mat({{0.75, -1}, {1.25, -4}}),
         mat({{-0.5}, {0}}), mat({{-0.5}, {-2}}), mat({{-0.5}, {0.5}})},
        {mat({{0, 1, 0}, {0, 0, 1}, {0.5, 1, -2}}), mat({{1, 0}, {0, 1}, {1, 0}}), mat({{1, -1, 1}}),
         mat({{2.167, 1, 0.333}, {0, 3, 1}}), mat({{-1}, {0}}), mat({{0}, {-1}}), mat({{0}, {-1}, {0}})},
    };
}

inline resopt::AgentModel example_model(int i)
{
    const ExampleAgent a = example_agents()[static_cast<std::size_t>(i)];
    return resopt::AgentModel(a.A, a.B, a.C, a.K, resopt::RegulatorSolution{a.U, a.W, a.X});
}

// Costs as stated for the example: f1 = -2 e^{-t/2} + 0.5 e^{0.3 t}, f2 = t^4 + 2t^2 + 2,
// f3 = 0.5 t^2 ln(1 + t^2) + t^2.
inline std::vector<resopt::CostSpec> literal_costs()
{
    using resopt::CostKind;
    return {{CostKind::exp_pair, {-2.0, -0.5, 0.5, 0.3}},
            {CostKind::quartic, {1.0, 2.0, 2.0}},
            {CostKind::log_quadratic, {0.5, 1.0}}};
}

// Costs used by the bundled scenarios (first term of f1 with positive sign).
inline std::vector<resopt::CostSpec> bundled_costs()
{
    auto c = literal_costs();
    c[0].params = {2.0, -0.5, 0.5, 0.3};
    return c;
}

// Sum of the literal gradients, written out by hand.
inline double literal_team_derivative(double t)
{
    return std::exp(-0.5 * t) + 0.15 * std::exp(0.3 * t) + 4 * t * t * t + 4 * t + t * std::log1p(t * t) +
           t * t * t / (1 + t * t) + 2 * t;
}

inline resopt::Scenario preset_scenario(const std::string& name, const std::vector<std::string>& overrides = {})
{
    nlohmann::json doc = resopt::to_json(resopt::preset(name));
    for (const auto& o : overrides) {
        resopt::apply_override(doc, o);
    }
    return resopt::build_scenario(resopt::scenario_file_from_json(doc));
}

inline double sup_distance(const resopt::Trajectory& a, const resopt::Trajectory& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        for (std::size_t i = 0; i < a.agents.size(); ++i) {
            d = std::max(d, (a.agents[i].y[k] - b.agents[i].y[k]).cwiseAbs().maxCoeff());
            d = std::max(d, (a.agents[i].x[k] - b.agents[i].x[k]).cwiseAbs().maxCoeff());
            d = std::max(d, (a.agents[i].rho[k] - b.agents[i].rho[k]).cwiseAbs().maxCoeff());
            d = std::max(d, (a.agents[i].z[k] - b.agents[i].z[k]).cwiseAbs().maxCoeff());
        }
    }
    return d;
}

}  // namespace testing_support

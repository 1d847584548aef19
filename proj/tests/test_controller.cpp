#include <cstring>

#include "doctest.h"
#include "resopt/controller.hpp"
#include "resopt/cost.hpp"
#include "resopt/errors.hpp"
#include "support.hpp"

using namespace resopt;
using testing_support::mat;
using testing_support::vec;

namespace {

NeighborValues scalar_table(std::vector<double> y, std::vector<double> rho, std::vector<double> z)
{
    NeighborValues v;
    for (std::size_t i = 0; i < y.size(); ++i) {
        v.y.push_back(vec({y[i]}));
        v.rho.push_back(vec({rho[i]}));
        v.z.push_back(vec({z[i]}));
    }
    return v;
}

bool bitwise_zero(const Eigen::VectorXd& v)
{
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double zero = 0.0;
        if (std::memcmp(&v(k), &zero, sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

const WeightedDigraph kTriangle(mat({{0, 1, 2}, {1, 0, 0}, {0, 3, 0}}));

}  // namespace

TEST_CASE("attacked consensus errors are exact zeros")
{
    const NeighborValues v = scalar_table({1.5, -2.0, 7.0}, {0.3, 4.0, -1.0}, {2.0, 0.1, -0.7});
    for (int i = 0; i < 3; ++i) {
        const ConsensusErrors t = consensus_errors_timebased(i, v, kTriangle, true);
        CHECK(bitwise_zero(t.e_y));
        CHECK(bitwise_zero(t.e_rho_z));
        const ConsensusErrors e = consensus_errors_eventbased(i, v, kTriangle, true);
        CHECK(bitwise_zero(e.e_y));
        CHECK(bitwise_zero(e.e_rho_z));
    }
}

TEST_CASE("consensus error examples")
{
    const NeighborValues same = scalar_table({2, 2, 2}, {1, 1, 1}, {0, 0, 0});
    for (int i = 0; i < 3; ++i) {
        CHECK(consensus_errors_timebased(i, same, kTriangle, false).e_y.isZero(0.0));
        CHECK(consensus_errors_timebased(i, same, kTriangle, false).e_rho_z.isZero(0.0));
        CHECK(consensus_errors_eventbased(i, same, kTriangle, false).e_y.isZero(0.0));
    }

    const WeightedDigraph pair(mat({{0, 1}, {0, 0}}));
    CHECK(consensus_errors_timebased(0, scalar_table({1, 0}, {0, 0}, {0, 0}), pair, false).e_y(0) == 1.0);
    CHECK(consensus_errors_eventbased(0, scalar_table({2, 0}, {0, 0}, {0, 0}), pair, false).e_y(0) == 2.0);

    const NeighborValues v = scalar_table({1, 2, 4}, {1, 0, 0}, {0, 1, 3});
    const ConsensusErrors e0 = consensus_errors_timebased(0, v, kTriangle, false);
    CHECK(e0.e_y(0) == 1 * (1 - 2) + 2 * (1 - 4));
    CHECK(e0.e_rho_z(0) == 1 * (1 - 1) + 2 * (1 - 3));
    CHECK_THROWS_AS(consensus_errors_timebased(3, v, kTriangle, false), ValidationError);
}

TEST_CASE("control law examples")
{
    const AgentModel m = testing_support::example_model(0);
    const AlgorithmParams p;
    const ConsensusErrors none{vec({0.0}), vec({0.0})};

    const ControlOutput at_rest = ctrl_derivative_timebased(m, Eigen::Vector2d::Zero(), vec({0.0}), none, vec({0.0}), p);
    CHECK(at_rest.u.isZero(0.0));
    CHECK(at_rest.d_rho.isZero(0.0));
    CHECK(at_rest.d_z.isZero(0.0));

    const ControlOutput one = ctrl_derivative_timebased(m, Eigen::Vector2d::Zero(), vec({1.0}), none, vec({0.0}), p);
    CHECK(one.u(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(one.u(1) == doctest::Approx(0.75).epsilon(1e-14));

    const ConsensusErrors e{vec({0.5}), vec({-0.25})};
    const ControlOutput c = ctrl_derivative_timebased(m, Eigen::Vector2d(1, -1), vec({0.2}), e, vec({0.3}), p);
    const double theta = -0.3 - 1.0 * 0.5 - 2.0 * 1.0 * -0.25;
    CHECK(c.d_rho(0) == doctest::Approx(theta));
    CHECK(c.d_z(0) == doctest::Approx(-0.5));
    // u = -K x - (U - K X) rho + W theta, written out for agent 1
    CHECK(c.u(0) == doctest::Approx(-(3 - 5) - (1 - 4) * 0.2 + 1.5 * theta));
    CHECK(c.u(1) == doctest::Approx(-(1.5 - 1) - (0.5 - 1.25) * 0.2 + 0.5 * theta));
}

TEST_CASE("attacked agents follow their own gradient only")
{
    const AgentModel m = testing_support::example_model(0);
    const NeighborValues v = scalar_table({1.5, -2.0, 7.0}, {0.3, 4.0, -1.0}, {2.0, 0.1, -0.7});
    const ConsensusErrors e = consensus_errors_timebased(0, v, kTriangle, true);
    const ControlOutput c = ctrl_derivative_timebased(m, Eigen::Vector2d(1, 2), v.rho[0], e, vec({0.8}), AlgorithmParams{});
    CHECK(c.d_rho(0) == -0.8);
    CHECK(bitwise_zero(c.d_z));
}

TEST_CASE("attack-free law coincides with the time-based law without attacks")
{
    const AgentModel m = testing_support::example_model(1);
    const NeighborValues v = scalar_table({1.5, -2.0, 7.0}, {0.3, 4.0, -1.0}, {2.0, 0.1, -0.7});
    const AlgorithmParams p{2.0, 1.5};
    for (int i = 0; i < 3; ++i) {
        const ConsensusErrors e = consensus_errors_timebased(i, v, kTriangle, false);
        const ControlOutput a = ctrl_derivative_timebased(m, Eigen::Vector2d(0.4, -0.1), v.rho[i], e, vec({0.2}), p);
        const ControlOutput b =
            ctrl_derivative_attack_free(i, m, Eigen::Vector2d(0.4, -0.1), v.rho[i], v, kTriangle, vec({0.2}), p);
        CHECK(a.u == b.u);
        CHECK(a.d_rho == b.d_rho);
        CHECK(a.d_z == b.d_z);
    }
}

TEST_CASE("trigger examples")
{
    TriggerParams p;
    p.sigma_g = 2.0;
    p.theta_g = 0.1;
    const ConsensusErrors e{vec({0.0}), vec({1.0})};
    const TriggerValues v = trigger_values(vec({0.0}), vec({0.0}), vec({std::sqrt(0.5)}), vec({0.0}), e, p);
    CHECK(v.g == doctest::Approx(0.4));
    CHECK(v.h == 0.0);
    CHECK_FALSE(trigger_check(v, 1.0, 1.0, p));
    CHECK(trigger_check(v, 0.5, 1.0, p));

    const TriggerValues fresh = trigger_values(vec({1.0}), vec({2.0}), vec({1.0}), vec({2.0}), e, TriggerParams{});
    CHECK(fresh.g <= 0.0);
    CHECK_FALSE(trigger_check(fresh, 1e-12, 1e-12, TriggerParams{}));

    TriggerParams stat;
    stat.theta_g = 0.0;
    const TriggerValues tiny = trigger_values(vec({0.0}), vec({0.0}), vec({1e-4}), vec({0.0}), e, stat);
    CHECK(trigger_check(tiny, 1e-12, 1.0, stat));
}

TEST_CASE("auxiliary variable dynamics")
{
    TriggerParams p;
    p.k_g = 1.0;
    p.delta_g = 0.5;
    const EtaDerivative d = eta_derivative(2.0, 1.0, {-1.0, 0.0}, p, false);
    CHECK(d.d_eta_g == doctest::Approx(-1.5));
    const EtaDerivative frozen = eta_derivative(2.0, 1.0, {-1.0, 3.0}, p, true);
    CHECK(frozen.d_eta_g == 0.0);
    CHECK(frozen.d_eta_h == 0.0);
    p.delta_h = 0.0;
    CHECK(eta_derivative(2.0, 3.0, {0.0, 5.0}, p, false).d_eta_h == -p.k_h * 3.0);
}

TEST_CASE("retry schedule after attacked attempts")
{
    TriggerParams p;
    p.dwell_kappa = 0.1;
    CHECK(schedule_after_attacked_attempt(5.0, p) == doctest::Approx(5.1));
    double t = 2.0;
    for (int k = 1; k <= 5; ++k) {
        t = schedule_after_attacked_attempt(t, p);
        CHECK(t == doctest::Approx(2.0 + 0.1 * k));
    }
}

TEST_CASE("parameter validation")
{
    TriggerParams p;
    p.k_g = 0.2;
    p.delta_g = 0.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    TriggerParams q;
    q.theta_h = 1.0;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    CHECK_NOTHROW(TriggerParams{}.validate());
    CHECK_THROWS_AS((AlgorithmParams{0.0, 1.0}.validate()), ValidationError);
}

TEST_CASE("controller derivatives vanish at the constructed equilibrium")
{
    const Scenario s = testing_support::preset_scenario("case1");
    const double theta = centralized_optimum(s.costs)(0);
    const int n = s.num_agents();
    Eigen::VectorXd grad(n);
    for (int i = 0; i < n; ++i) {
        grad(i) = gradient(s.costs[static_cast<std::size_t>(i)], vec({theta}))(0);
    }
    CHECK(std::abs(grad.sum()) < 1e-9);
    for (int mode = 0; mode < s.graph_process.num_modes(); ++mode) {
        const WeightedDigraph& g = s.graph_process.graph(mode);
        // rho_i = theta*, z with beta L (rho + z) = -grad
        const Eigen::MatrixXd lap = laplacian(g);
        const Eigen::VectorXd w = lap.completeOrthogonalDecomposition().solve(-grad / s.params.beta);
        REQUIRE((lap * w + grad / s.params.beta).norm() < 1e-9);
        NeighborValues v;
        for (int i = 0; i < n; ++i) {
            v.y.push_back(vec({theta}));
            v.rho.push_back(vec({theta}));
            v.z.push_back(vec({w(i) - theta}));
        }
        for (int i = 0; i < n; ++i) {
            const AgentModel& m = s.agents[static_cast<std::size_t>(i)];
            const ConsensusErrors e = consensus_errors_timebased(i, v, g, false);
            const Eigen::VectorXd x = m.X() * v.rho[static_cast<std::size_t>(i)];
            CHECK((m.C() * x - vec({theta})).norm() < 1e-12);
            const ControlOutput c = ctrl_derivative_timebased(m, x, v.rho[static_cast<std::size_t>(i)], e,
                                                              vec({grad(i)}), s.params);
            CHECK(c.d_rho.norm() < 1e-9);
            CHECK(c.d_z.norm() < 1e-9);
            CHECK(plant_derivative(m, x, c.u).norm() < 1e-9);
        }
    }
}

#include <cmath>

#include "doctest.h"
#include "resopt/errors.hpp"
#include "resopt/sim.hpp"
#include "support.hpp"

using namespace resopt;
using testing_support::mat;
using testing_support::preset_scenario;
using testing_support::vec;

namespace {

// Three identical scalar agents x' = u with K = 1 and cost t^2 / 2; started
// from equal states they never couple and y(t) = e^{-t}.
Scenario decoupled(double horizon)
{
    Scenario s = preset_scenario("case1");
    const Eigen::MatrixXd one = mat({{1}});
    s.agents.clear();
    s.costs.clear();
    InitialStates init;
    for (int i = 0; i < 3; ++i) {
        s.agents.emplace_back(mat({{0}}), one, one, one, RegulatorSolution{mat({{0}}), one, one});
        s.costs.push_back({CostKind::custom_polynomial, {0.0, 0.0, 0.5}});
        init.x.push_back(vec({1.0}));
        init.rho.push_back(vec({1.0}));
        init.z.push_back(vec({0.0}));
    }
    s.initial = init;
    s.horizon = horizon;
    s.attacks = AttackSchedule({}, horizon);
    s.algorithm = Algorithm::time_based;
    return s;
}

Trajectory synthetic(double rate)
{
    Trajectory t;
    t.agents.resize(1);
    for (int k = 0; k <= 1000; ++k) {
        const double time = 0.01 * k;
        t.times.push_back(time);
        t.agents[0].y.push_back(vec({0.5 + std::exp(-rate * time)}));
    }
    return t;
}

bool same_trajectory(const Trajectory& a, const Trajectory& b)
{
    if (a.times != b.times || a.graph_state != b.graph_state || a.attack_active != b.attack_active) {
        return false;
    }
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        const AgentSeries& p = a.agents[i];
        const AgentSeries& q = b.agents[i];
        if (p.x != q.x || p.y != q.y || p.rho != q.rho || p.z != q.z || p.u != q.u || p.eta_g != q.eta_g ||
            p.eta_h != q.eta_h || p.attempts.size() != q.attempts.size()) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("decoupled agents decay as e^{-t}")
{
    const Trajectory t = run(decoupled(5.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        for (const auto& a : t.agents) {
            worst = std::max(worst, std::abs(a.y[k](0) - std::exp(-t.times[k])));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("zero costs from the origin stay at the origin")
{
    Scenario s = decoupled(2.0);
    for (auto& c : s.costs) {
        c.params = {0.0, 0.0, 0.0};
    }
    for (std::size_t i = 0; i < 3; ++i) {
        s.initial->x[i].setZero();
        s.initial->rho[i].setZero();
    }
    const Trajectory t = run(s);
    for (const auto& a : t.agents) {
        for (std::size_t k = 0; k < t.times.size(); ++k) {
            CHECK(a.x[k].isZero(0.0));
            CHECK(a.z[k].isZero(0.0));
        }
    }
}

TEST_CASE("fitted rate on synthetic trajectories")
{
    const ConvergenceReport r = convergence_report(synthetic(2.0), vec({0.5}));
    CHECK(r.fitted_rate == doctest::Approx(-2.0).epsilon(0.01));
    CHECK(r.log_drop == doctest::Approx(20.0).epsilon(0.01));

    Trajectory flat = synthetic(2.0);
    for (auto& y : flat.agents[0].y) {
        y = vec({0.5});
    }
    const ConvergenceReport z = convergence_report(flat, vec({0.5}));
    CHECK(z.final_error == 0.0);
    CHECK(z.log_envelope.front() == doctest::Approx(std::log(1e-15)));
    CHECK(z.fitted_rate == doctest::Approx(0.0));
    CHECK_THROWS_AS(convergence_report(Trajectory{}, vec({0.0})), PreconditionError);
}

TEST_CASE("halving the step barely moves the final outputs")
{
    Scenario coarse = preset_scenario("case1", {"sim.horizon=10"});
    Scenario fine = coarse;
    fine.step = coarse.step / 2.0;
    fine.record_every = coarse.record_every * 2;
    const Trajectory a = run(coarse);
    const Trajectory b = run(fine);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK((a.agents[i].y.back() - b.agents[i].y.back()).norm() < 1e-4);
    }
}

TEST_CASE("runs are deterministic")
{
    const Scenario s = preset_scenario("case3", {"sim.horizon=40"});
    CHECK(same_trajectory(run(s), run(s)));
}

TEST_CASE("time-based without attacks equals the attack-free law exactly")
{
    Scenario tb = preset_scenario("case1", {"sim.horizon=10"});
    tb.algorithm = Algorithm::time_based;
    Scenario af = tb;
    af.algorithm = Algorithm::attack_free;
    const Trajectory a = run(tb);
    const Trajectory b = run(af);
    CHECK(testing_support::sup_distance(a, b) == 0.0);
}

TEST_CASE("event-based with firing at every step tracks time-based")
{
    Scenario ev = preset_scenario("case1", {"sim.horizon=10"});
    ev.algorithm = Algorithm::event_based;
    ev.trigger.theta_g = ev.trigger.theta_h = 0.0;
    ev.trigger.delta_g = ev.trigger.delta_h = 0.0;
    ev.trigger.k_g = ev.trigger.k_h = 1e3;
    ev.trigger.eta_g0 = ev.trigger.eta_h0 = 1e-300;
    Scenario tb = ev;
    tb.algorithm = Algorithm::time_based;
    const Trajectory a = run(ev);
    const Trajectory b = run(tb);
    CHECK(testing_support::sup_distance(a, b) < 1e-6);
    for (const auto& agent : a.agents) {
        CHECK(agent.attempts.size() > 9000);
    }
}

TEST_CASE("case 3 keeps the auxiliary variables positive and retries within the dwell")
{
    const Scenario s = preset_scenario("case3");
    const Trajectory t = run(s);
    CHECK(t.eta_violations == 0);
    CHECK(t.eta_min > 0.0);
    for (const auto& a : t.agents) {
        for (std::size_t k = 0; k < a.eta_g.size(); ++k) {
            CHECK(a.eta_g[k] + a.eta_h[k] > 0.0);
        }
    }
    const double kappa = s.trigger.dwell_kappa;
    for (const auto& burst : s.attacks.intervals()) {
        const double end = burst.start + burst.duration;
        for (const auto& a : t.agents) {
            bool hit = false;
            for (const auto& at : a.attempts) {
                if (!at.success && at.time >= burst.start && at.time < end) {
                    hit = true;
                }
            }
            if (!hit) {
                continue;
            }
            double first = INFINITY;
            for (const auto& at : a.attempts) {
                if (at.success && at.time >= end) {
                    first = std::min(first, at.time);
                }
            }
            CHECK(first <= end + kappa + 1e-9);
        }
    }
    const ZenoAudit z = zeno_audit(t);
    CHECK(z.applicable);
    CHECK(z.pass);
}

TEST_CASE("retries repeat every dwell during a burst")
{
    const Scenario s = preset_scenario("case3", {"sim.horizon=40"});
    const Trajectory t = run(s);
    for (const auto& a : t.agents) {
        for (std::size_t k = 1; k < a.attempts.size(); ++k) {
            if (!a.attempts[k - 1].success) {
                CHECK(a.attempts[k].time - a.attempts[k - 1].time == doctest::Approx(s.trigger.dwell_kappa));
            }
        }
    }
}

TEST_CASE("beta sweep ordering")
{
    const Scenario s = preset_scenario("case1", {"sim.horizon=10"});
    const auto two = compare_beta_sweep(s, {0.5, 1.5}, 5.0);
    REQUIRE(two.size() == 2);
    CHECK(two[0].beta == 1.5);
    CHECK(two[0].error < two[1].error);

    const auto single = compare_beta_sweep(s, {1.0}, 5.0);
    CHECK(single.size() == 1);

    const auto same = compare_beta_sweep(s, {1.0, 1.0, 1.0}, 5.0);
    CHECK(same[0].error == same[1].error);
    CHECK(same[1].error == same[2].error);

    Scenario ev = s;
    ev.algorithm = Algorithm::event_based;
    CHECK_THROWS_AS(compare_beta_sweep(ev, {1.0}, 5.0), PreconditionError);
}

TEST_CASE("divergence is reported with its time")
{
    Scenario s = preset_scenario("case1", {"sim.horizon=5", "sim.step=0.5"});
    try {
        run(s);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 5.0);
    }
}

TEST_CASE("zeno audit")
{
    const Scenario s = preset_scenario("case1", {"sim.horizon=2"});
    CHECK_FALSE(zeno_audit(run(s)).applicable);

    Scenario dense = preset_scenario("case3", {"sim.horizon=10"});
    dense.trigger.theta_g = dense.trigger.theta_h = 0.0;
    dense.trigger.delta_g = dense.trigger.delta_h = 0.0;
    dense.trigger.k_g = dense.trigger.k_h = 50.0;
    const Trajectory d = run(dense);
    const ZenoAudit z = zeno_audit(d);
    CHECK(z.pass);
    const Trajectory sparse = run(preset_scenario("case3", {"sim.horizon=10"}));
    const ZenoAudit zs = zeno_audit(sparse);
    for (std::size_t i = 0; i < z.event_counts.size(); ++i) {
        CHECK(z.event_counts[i] >= zs.event_counts[i]);
    }

    Trajectory crafted = d;
    crafted.agents[0].attempts = {{1.0, true}, {1.0 + d.step / 2.0, true}};
    CHECK_FALSE(zeno_audit(crafted).pass);
}

TEST_CASE("scenario validation")
{
    Scenario s = preset_scenario("case1");
    s.costs.pop_back();
    CHECK_THROWS_AS(s.validate(), ValidationError);
    Scenario t = preset_scenario("case1");
    t.step = 0.0;
    CHECK_THROWS_AS(t.validate(), ValidationError);
    Scenario u = preset_scenario("case2");
    u.attacks = AttackSchedule({{0.1, 0.1}}, 1.0);
    CHECK_THROWS_AS(u.validate(), ValidationError);
}

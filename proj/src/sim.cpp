#include "resopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>

#include "resopt/errors.hpp"
#include "resopt/rng.hpp"

namespace resopt {

namespace {

constexpr double kDivergenceBound = 1e9;
constexpr double kLogFloor = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Offsets of one agent's block inside the packed state:
// [x (n_i), rho (q), z (q), eta_g, eta_h]
struct Layout {
    std::vector<Eigen::Index> x, rho, z, eta;
    std::vector<int> n;
    int q = 1;
    Eigen::Index size = 0;

    explicit Layout(const Scenario& s) : q(s.output_dim())
    {
        for (const auto& m : s.agents) {
            n.push_back(m.state_dim());
            x.push_back(size);
            size += m.state_dim();
            rho.push_back(size);
            size += q;
            z.push_back(size);
            size += q;
            eta.push_back(size);
            size += 2;
        }
    }
};

// Everything held constant over one integration step.
struct Held {
    const WeightedDigraph* graph = nullptr;
    NeighborValues sampled;                   // attack_free
    std::vector<ConsensusErrors> errors;      // time_based, event_based
    std::vector<char> frozen;                 // event_based: governing attempt attacked
    std::vector<Eigen::VectorXd> y_hat, rz_hat;  // event_based: own last broadcast
};

struct EventState {
    std::vector<char> pending_retry;
    std::vector<long> retry_index;
    std::vector<char> last_attacked;
};

class Integrator {
public:
    Integrator(const Scenario& s) : s_(s), lay_(s), u_(s.agents.size()) {}

    const Layout& layout() const { return lay_; }

    Eigen::VectorXd derivative(double t, const Eigen::VectorXd& st, const Held& h, bool keep_u)
    {
        if (!st.allFinite()) {
            throw DivergenceError(t, "state diverged at t = " + std::to_string(t));
        }
        Eigen::VectorXd d(st.size());
        const int q = lay_.q;
        for (std::size_t i = 0; i < s_.agents.size(); ++i) {
            const AgentModel& m = s_.agents[i];
            const int ii = static_cast<int>(i);
            const Eigen::VectorXd x = st.segment(lay_.x[i], lay_.n[i]);
            const Eigen::VectorXd rho = st.segment(lay_.rho[i], q);
            const Eigen::VectorXd y = m.C() * x;
            const Eigen::VectorXd grad = gradient(s_.costs[i], y);

            ControlOutput c;
            if (s_.algorithm == Algorithm::attack_free) {
                c = ctrl_derivative_attack_free(ii, m, x, rho, h.sampled, *h.graph, grad, s_.params);
            } else {
                c = ctrl_derivative_timebased(m, x, rho, h.errors[i], grad, s_.params);
            }
            d.segment(lay_.x[i], lay_.n[i]) = m.A() * x + m.B() * c.u;
            d.segment(lay_.rho[i], q) = c.d_rho;
            d.segment(lay_.z[i], q) = c.d_z;

            if (s_.algorithm == Algorithm::event_based) {
                const Eigen::VectorXd rz = rho + st.segment(lay_.z[i], q);
                const double eg = st(lay_.eta[i]);
                const double eh = st(lay_.eta[i] + 1);
                TriggerValues tv = trigger_values(y, rz, h.y_hat[i], h.rz_hat[i], h.errors[i], s_.trigger);
                // keep sigma g <= eta, sigma h <= eta_h between grid checks
                tv.g = std::min(tv.g, eg / s_.trigger.sigma_g);
                tv.h = std::min(tv.h, eh / s_.trigger.sigma_h);
                const EtaDerivative de = eta_derivative(eg, eh, tv, s_.trigger, h.frozen[i] != 0);
                d(lay_.eta[i]) = de.d_eta_g;
                d(lay_.eta[i] + 1) = de.d_eta_h;
            } else {
                d(lay_.eta[i]) = 0.0;
                d(lay_.eta[i] + 1) = 0.0;
            }
            if (keep_u) {
                u_[i] = c.u;
            }
        }
        return d;
    }

    const std::vector<Eigen::VectorXd>& last_u() const { return u_; }

private:
    const Scenario& s_;
    Layout lay_;
    std::vector<Eigen::VectorXd> u_;
};

NeighborValues sample_values(const Scenario& s, const Layout& lay, const Eigen::VectorXd& st)
{
    NeighborValues v;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        v.y.push_back(s.agents[i].C() * st.segment(lay.x[i], lay.n[i]));
        v.rho.push_back(st.segment(lay.rho[i], lay.q));
        v.z.push_back(st.segment(lay.z[i], lay.q));
    }
    return v;
}

}  // namespace

std::string to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::attack_free:
        return "attack_free";
    case Algorithm::time_based:
        return "time_based";
    case Algorithm::event_based:
        return "event_based";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& s)
{
    if (s == "attack_free") {
        return Algorithm::attack_free;
    }
    if (s == "time_based") {
        return Algorithm::time_based;
    }
    if (s == "event_based") {
        return Algorithm::event_based;
    }
    throw ValidationError("unknown algorithm '" + s + "' (expected attack_free, time_based or event_based)");
}

void Scenario::validate() const
{
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ValidationError("sim.step must be positive");
    }
    if (!(horizon >= step) || !std::isfinite(horizon)) {
        throw ValidationError("sim.horizon must be finite and at least one step");
    }
    if (record_every < 1) {
        throw ValidationError("sim.record_every must be at least 1");
    }
    if (agents.empty()) {
        throw ValidationError("scenario needs at least one agent");
    }
    const int n = num_agents();
    if (static_cast<int>(costs.size()) != n) {
        throw ValidationError("scenario has " + std::to_string(n) + " agents but " + std::to_string(costs.size()) +
                              " costs");
    }
    if (graph_process.num_vertices() != n) {
        throw ValidationError("graphs have " + std::to_string(graph_process.num_vertices()) + " vertices but there are " +
                              std::to_string(n) + " agents");
    }
    const int q = output_dim();
    for (int i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        if (agents[si].output_dim() != q) {
            throw ValidationError("agent " + std::to_string(i) + " has output dimension " +
                                  std::to_string(agents[si].output_dim()) + ", expected " + std::to_string(q));
        }
        if (costs[si].dimension != q) {
            throw ValidationError("cost " + std::to_string(i) + " has dimension " +
                                  std::to_string(costs[si].dimension) + ", expected " + std::to_string(q));
        }
        costs[si].validate();
    }
    if (!attacks.empty() && attacks.horizon() < horizon) {
        throw ValidationError("attack schedule horizon is shorter than the simulation horizon");
    }
    params.validate();
    if (algorithm == Algorithm::event_based) {
        trigger.validate();
    }
    if (budget) {
        budget->validate();
    }
    if (initial) {
        if (initial->x.size() != agents.size() || initial->rho.size() != agents.size() ||
            initial->z.size() != agents.size()) {
            throw ValidationError("initial states must list every agent");
        }
        for (int i = 0; i < n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            if (initial->x[si].size() != agents[si].state_dim() || initial->rho[si].size() != q ||
                initial->z[si].size() != q) {
                throw ValidationError("initial state of agent " + std::to_string(i) + " has wrong dimensions");
            }
        }
    } else if (!(init_lo <= init_hi)) {
        throw ValidationError("init_range needs lo <= hi");
    }
    stationary_weighting(graph_process);
}

InitialStates resolve_initial_states(const Scenario& s)
{
    if (s.initial) {
        return *s.initial;
    }
    Rng rng(derive_seed(s.seed, 1));
    InitialStates out;
    const int q = s.output_dim();
    for (const auto& m : s.agents) {
        Eigen::VectorXd x(m.state_dim());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            x(k) = rng.uniform(s.init_lo, s.init_hi);
        }
        Eigen::VectorXd rho(q);
        for (Eigen::Index k = 0; k < q; ++k) {
            rho(k) = rng.uniform(s.init_lo, s.init_hi);
        }
        Eigen::VectorXd z(q);
        for (Eigen::Index k = 0; k < q; ++k) {
            z(k) = rng.uniform(s.init_lo, s.init_hi);
        }
        out.x.push_back(x);
        out.rho.push_back(rho);
        out.z.push_back(z);
    }
    return out;
}

SwitchingPath scenario_switching_path(const Scenario& s)
{
    return sample_switching_path(s.graph_process, s.horizon, derive_seed(s.seed, 0));
}

std::vector<double> AgentSeries::event_times() const
{
    std::vector<double> out;
    for (const auto& a : attempts) {
        if (a.success) {
            out.push_back(a.time);
        }
    }
    return out;
}

Trajectory run(const Scenario& s)
{
    s.validate();
    const std::size_t na = s.agents.size();
    const double h = s.step;
    const long total = std::lround(s.horizon / h);
    const bool event = s.algorithm == Algorithm::event_based;

    Integrator integ(s);
    const Layout& lay = integ.layout();

    const InitialStates init = resolve_initial_states(s);
    Eigen::VectorXd st = Eigen::VectorXd::Zero(lay.size);
    for (std::size_t i = 0; i < na; ++i) {
        st.segment(lay.x[i], lay.n[i]) = init.x[i];
        st.segment(lay.rho[i], lay.q) = init.rho[i];
        st.segment(lay.z[i], lay.q) = init.z[i];
        if (event) {
            st(lay.eta[i]) = s.trigger.eta_g0;
            st(lay.eta[i] + 1) = s.trigger.eta_h0;
        }
    }

    Trajectory tr;
    tr.algorithm = s.algorithm;
    tr.step = h;
    tr.horizon = static_cast<double>(total) * h;
    tr.steps = total;
    tr.path = scenario_switching_path(s);
    tr.agents.resize(na);
    tr.eta_min = event ? std::min(s.trigger.eta_g0, s.trigger.eta_h0) : 0.0;

    const long dwell_steps =
        event ? std::max(1L, static_cast<long>(std::ceil(s.trigger.dwell_kappa / h - 1e-9))) : 0L;
    EventState ev{std::vector<char>(na, 0), std::vector<long>(na, 0), std::vector<char>(na, 0)};
    NeighborValues table;  // last successful broadcasts

    Held held;
    held.errors.resize(na);
    held.frozen.assign(na, 0);
    held.y_hat.resize(na);
    held.rz_hat.resize(na);

    for (long n = 0;; ++n) {
        const double t = static_cast<double>(n) * h;
        const bool last = n == total;
        const int mode = tr.path.state_at(t);
        const bool attacked = !s.attacks.empty() && s.attacks.active(std::min(t, s.attacks.horizon()));

        if (!last) {
            held.graph = &s.graph_process.graph(mode);
            const NeighborValues now = sample_values(s, lay, st);
            switch (s.algorithm) {
            case Algorithm::attack_free:
                held.sampled = now;
                break;
            case Algorithm::time_based:
                for (std::size_t i = 0; i < na; ++i) {
                    held.errors[i] = consensus_errors_timebased(static_cast<int>(i), now, *held.graph, attacked);
                }
                break;
            case Algorithm::event_based: {
                if (n == 0) {
                    table = now;
                }
                std::vector<char> attempt(na, 0);
                for (std::size_t i = 0; i < na; ++i) {
                    if (n == 0) {
                        attempt[i] = 1;
                    } else if (ev.pending_retry[i]) {
                        attempt[i] = n >= ev.retry_index[i] ? 1 : 0;
                    } else {
                        const ConsensusErrors e =
                            consensus_errors_eventbased(static_cast<int>(i), table, *held.graph, false);
                        const TriggerValues tv = trigger_values(now.y[i], now.rho[i] + now.z[i], table.y[i],
                                                                table.rho[i] + table.z[i], e, s.trigger);
                        attempt[i] = trigger_check(tv, st(lay.eta[i]), st(lay.eta[i] + 1), s.trigger) ? 1 : 0;
                    }
                }
                for (std::size_t i = 0; i < na; ++i) {
                    if (!attempt[i]) {
                        continue;
                    }
                    tr.agents[i].attempts.push_back({t, !attacked});
                    if (attacked) {
                        ev.last_attacked[i] = 1;
                        ev.pending_retry[i] = 1;
                        ev.retry_index[i] = n + dwell_steps;
                    } else {
                        ev.last_attacked[i] = 0;
                        ev.pending_retry[i] = 0;
                        table.y[i] = now.y[i];
                        table.rho[i] = now.rho[i];
                        table.z[i] = now.z[i];
                    }
                }
                for (std::size_t i = 0; i < na; ++i) {
                    held.frozen[i] = ev.last_attacked[i];
                    held.errors[i] = consensus_errors_eventbased(static_cast<int>(i), table, *held.graph,
                                                                 ev.last_attacked[i] != 0);
                    held.y_hat[i] = table.y[i];
                    held.rz_hat[i] = table.rho[i] + table.z[i];
                }
                break;
            }
            }
        }

        const Eigen::VectorXd k1 = integ.derivative(t, st, held, true);

        if (n % s.record_every == 0 || last) {
            tr.times.push_back(t);
            tr.graph_state.push_back(mode);
            tr.attack_active.push_back(attacked ? 1 : 0);
            for (std::size_t i = 0; i < na; ++i) {
                AgentSeries& a = tr.agents[i];
                const Eigen::VectorXd x = st.segment(lay.x[i], lay.n[i]);
                a.x.push_back(x);
                a.y.push_back(s.agents[i].C() * x);
                a.rho.push_back(st.segment(lay.rho[i], lay.q));
                a.z.push_back(st.segment(lay.z[i], lay.q));
                a.u.push_back(integ.last_u()[i]);
                a.eta_g.push_back(st(lay.eta[i]));
                a.eta_h.push_back(st(lay.eta[i] + 1));
            }
        }
        if (last) {
            break;
        }

        const Eigen::VectorXd k2 = integ.derivative(t + h / 2.0, st + (h / 2.0) * k1, held, false);
        const Eigen::VectorXd k3 = integ.derivative(t + h / 2.0, st + (h / 2.0) * k2, held, false);
        const Eigen::VectorXd k4 = integ.derivative(t + h, st + h * k3, held, false);
        st += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double t_next = static_cast<double>(n + 1) * h;
        if (!st.allFinite() || st.cwiseAbs().maxCoeff() > kDivergenceBound) {
            throw DivergenceError(t_next, "state diverged at t = " + std::to_string(t_next));
        }
        if (event) {
            for (std::size_t i = 0; i < na; ++i) {
                const double eg = st(lay.eta[i]);
                const double eh = st(lay.eta[i] + 1);
                tr.eta_min = std::min({tr.eta_min, eg, eh});
                if (!(eg > 0.0) || !(eh > 0.0)) {
                    ++tr.eta_violations;
                }
            }
        }
    }
    return tr;
}

double output_spread(const Trajectory& t, std::size_t k)
{
    double m = 0.0;
    for (const auto& a : t.agents) {
        for (const auto& b : t.agents) {
            m = std::max(m, (a.y[k] - b.y[k]).norm());
        }
    }
    return m;
}

double error_at(const Trajectory& t, const Eigen::VectorXd& theta_star, double time)
{
    auto it = std::lower_bound(t.times.begin(), t.times.end(), time - 1e-12);
    if (it == t.times.end()) {
        throw RangeError("error_at: time " + std::to_string(time) + " is past the trajectory end");
    }
    const auto k = static_cast<std::size_t>(std::distance(t.times.begin(), it));
    double m = 0.0;
    for (const auto& a : t.agents) {
        m = std::max(m, (a.y[k] - theta_star).norm());
    }
    return m;
}

ConvergenceReport convergence_report(const Trajectory& t, const Eigen::VectorXd& theta_star)
{
    if (t.times.empty()) {
        throw PreconditionError("convergence_report needs a nonempty trajectory");
    }
    ConvergenceReport r;
    r.theta_star = theta_star;
    const std::size_t nrec = t.times.size();
    r.error_series.resize(t.agents.size());
    r.log_envelope.assign(nrec, std::log(kLogFloor));
    for (std::size_t i = 0; i < t.agents.size(); ++i) {
        auto& series = r.error_series[i];
        series.reserve(nrec);
        for (std::size_t k = 0; k < nrec; ++k) {
            const double e = std::log(std::max((t.agents[i].y[k] - theta_star).norm(), kLogFloor));
            series.push_back(e);
            r.log_envelope[k] = std::max(r.log_envelope[k], e);
        }
    }
    r.final_error = 0.0;
    for (const auto& a : t.agents) {
        r.final_error = std::max(r.final_error, (a.y.back() - theta_star).norm());
    }
    r.final_spread = output_spread(t, nrec - 1);

    const double t0 = t.times.front();
    const double cut = t0 + 0.2 * (t.times.back() - t0);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double cnt = 0.0;
    for (std::size_t k = 0; k < nrec; ++k) {
        if (t.times[k] < cut) {
            continue;
        }
        const double x = t.times[k];
        const double y = r.log_envelope[k];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        cnt += 1.0;
    }
    const double denom = cnt * sxx - sx * sx;
    r.fitted_rate = cnt >= 2.0 && denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    r.log_drop = *std::max_element(r.log_envelope.begin(), r.log_envelope.end()) - r.log_envelope.back();

    for (const auto& a : t.agents) {
        AgentTriggerStats ts;
        ts.attempts = static_cast<int>(a.attempts.size());
        ts.min_gap = kInf;
        for (std::size_t k = 0; k < a.attempts.size(); ++k) {
            if (a.attempts[k].success) {
                ++ts.successes;
            } else {
                ++ts.attacked;
            }
            if (k > 0) {
                ts.min_gap = std::min(ts.min_gap, a.attempts[k].time - a.attempts[k - 1].time);
            }
        }
        ts.mean_gap = a.attempts.size() >= 2
                          ? (a.attempts.back().time - a.attempts.front().time) /
                                static_cast<double>(a.attempts.size() - 1)
                          : kInf;
        r.trigger_stats.push_back(ts);
    }
    return r;
}

std::vector<BetaResult> compare_beta_sweep(const Scenario& base, const std::vector<double>& betas,
                                           double probe_time)
{
    if (base.algorithm == Algorithm::event_based) {
        throw PreconditionError("compare_beta_sweep needs an attack_free or time_based scenario");
    }
    const Eigen::VectorXd theta_star = centralized_optimum(base.costs);
    std::vector<std::future<double>> jobs;
    for (double b : betas) {
        jobs.push_back(std::async(std::launch::async, [&base, &theta_star, b, probe_time] {
            Scenario s = base;
            s.params.beta = b;
            return error_at(run(s), theta_star, probe_time);
        }));
    }
    std::vector<BetaResult> out;
    for (std::size_t k = 0; k < betas.size(); ++k) {
        out.push_back({betas[k], jobs[k].get()});
    }
    std::stable_sort(out.begin(), out.end(), [](const BetaResult& a, const BetaResult& b) { return a.error < b.error; });
    return out;
}

ZenoAudit zeno_audit(const Trajectory& t)
{
    ZenoAudit z;
    if (t.algorithm != Algorithm::event_based) {
        return z;
    }
    z.applicable = true;
    z.pass = true;
    for (const auto& a : t.agents) {
        z.event_counts.push_back(static_cast<int>(a.attempts.size()));
        double gap = kInf;
        for (std::size_t k = 1; k < a.attempts.size(); ++k) {
            gap = std::min(gap, a.attempts[k].time - a.attempts[k - 1].time);
        }
        z.min_gap.push_back(gap);
        // grid times are n * step, so a one-step gap can land a few ulps short
        if (gap < t.step * (1.0 - 1e-9)) {
            z.pass = false;
        }
    }
    return z;
}

}  // namespace resopt

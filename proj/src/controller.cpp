#include "resopt/controller.hpp"

#include <cmath>
#include <string>

#include "resopt/errors.hpp"

namespace resopt {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be positive and finite");
    }
}

void require_unit(double v, const char* name)
{
    if (!(v >= 0.0 && v < 1.0)) {
        throw ValidationError(std::string(name) + " must lie in [0, 1)");
    }
}

void check_table(int i, const NeighborValues& v, const WeightedDigraph& g)
{
    const auto n = static_cast<std::size_t>(g.size());
    if (v.y.size() != n || v.rho.size() != n || v.z.size() != n) {
        throw ValidationError("neighbour table size does not match the graph");
    }
    if (i < 0 || i >= g.size()) {
        throw ValidationError("agent index out of range");
    }
}

ConsensusErrors neighbor_sums(int i, const NeighborValues& v, const WeightedDigraph& g)
{
    const auto si = static_cast<std::size_t>(i);
    ConsensusErrors e{Eigen::VectorXd::Zero(v.rho[si].size()), Eigen::VectorXd::Zero(v.y[si].size())};
    for (int j = 0; j < g.size(); ++j) {
        const double a = g.weight(i, j);
        if (a == 0.0) {
            continue;
        }
        const auto sj = static_cast<std::size_t>(j);
        e.e_rho_z += a * (v.rho[si] - v.rho[sj] + v.z[si] - v.z[sj]);
        e.e_y += a * (v.y[si] - v.y[sj]);
    }
    return e;
}

}  // namespace

void AlgorithmParams::validate() const
{
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
}

void TriggerParams::validate() const
{
    require_positive(sigma_g, "sigma_g");
    require_positive(sigma_h, "sigma_h");
    require_unit(theta_g, "theta_g");
    require_unit(theta_h, "theta_h");
    require_unit(delta_g, "delta_g");
    require_unit(delta_h, "delta_h");
    require_positive(k_g, "k_g");
    require_positive(k_h, "k_h");
    require_positive(eta_g0, "eta_g0");
    require_positive(eta_h0, "eta_h0");
    require_positive(dwell_kappa, "dwell_kappa");
    if (!(k_g > (1.0 - delta_g) / sigma_g)) {
        throw ValidationError("k_g must exceed (1 - delta_g) / sigma_g");
    }
    if (!(k_h > (1.0 - delta_h) / sigma_h)) {
        throw ValidationError("k_h must exceed (1 - delta_h) / sigma_h");
    }
}

ConsensusErrors consensus_errors_timebased(int i, const NeighborValues& v, const WeightedDigraph& g, bool attacked)
{
    check_table(i, v, g);
    const auto si = static_cast<std::size_t>(i);
    if (attacked) {
        return {Eigen::VectorXd::Zero(v.rho[si].size()), Eigen::VectorXd::Zero(v.y[si].size())};
    }
    return neighbor_sums(i, v, g);
}

ConsensusErrors consensus_errors_eventbased(int i, const NeighborValues& broadcast, const WeightedDigraph& g,
                                            bool last_attempt_attacked)
{
    check_table(i, broadcast, g);
    const auto si = static_cast<std::size_t>(i);
    if (last_attempt_attacked) {
        return {Eigen::VectorXd::Zero(broadcast.rho[si].size()), Eigen::VectorXd::Zero(broadcast.y[si].size())};
    }
    return neighbor_sums(i, broadcast, g);
}

ControlOutput ctrl_derivative_timebased(const AgentModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& rho,
                                        const ConsensusErrors& e, const Eigen::VectorXd& grad,
                                        const AlgorithmParams& p)
{
    ControlOutput out;
    out.d_rho = -grad - p.beta * e.e_rho_z - p.alpha * p.beta * e.e_y;
    out.d_z = p.alpha * p.beta * e.e_y;
    out.u = -m.K() * x - m.feedforward() * rho + m.W() * out.d_rho;
    return out;
}

ControlOutput ctrl_derivative_attack_free(int i, const AgentModel& m, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& rho, const NeighborValues& v,
                                          const WeightedDigraph& g, const Eigen::VectorXd& grad,
                                          const AlgorithmParams& p)
{
    check_table(i, v, g);
    const auto si = static_cast<std::size_t>(i);
    Eigen::VectorXd sum_rz = Eigen::VectorXd::Zero(rho.size());
    Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(v.y[si].size());
    for (int j = 0; j < g.size(); ++j) {
        const double a = g.weight(i, j);
        if (a == 0.0) {
            continue;
        }
        const auto sj = static_cast<std::size_t>(j);
        sum_rz += a * (v.rho[si] - v.rho[sj] + v.z[si] - v.z[sj]);
        sum_y += a * (v.y[si] - v.y[sj]);
    }
    ControlOutput out;
    out.d_rho = -grad - p.beta * sum_rz - p.alpha * p.beta * sum_y;
    out.d_z = p.alpha * p.beta * sum_y;
    out.u = -m.K() * x - m.feedforward() * rho + m.W() * out.d_rho;
    return out;
}

TriggerValues trigger_values(const Eigen::VectorXd& y, const Eigen::VectorXd& rho_plus_z,
                             const Eigen::VectorXd& y_hat, const Eigen::VectorXd& rho_plus_z_hat,
                             const ConsensusErrors& e, const TriggerParams& p)
{
    TriggerValues v;
    v.g = (y_hat - y).squaredNorm() - p.theta_g * e.e_y.squaredNorm();
    v.h = (rho_plus_z_hat - rho_plus_z).squaredNorm() - p.theta_h * e.e_rho_z.squaredNorm();
    return v;
}

bool trigger_check(const TriggerValues& v, double eta_g, double eta_h, const TriggerParams& p)
{
    return p.sigma_g * v.g > eta_g || p.sigma_h * v.h > eta_h;
}

EtaDerivative eta_derivative(double eta_g, double eta_h, const TriggerValues& v, const TriggerParams& p,
                             bool last_attempt_attacked)
{
    if (last_attempt_attacked) {
        return {};
    }
    return {-p.k_g * eta_g - p.delta_g * v.g, -p.k_h * eta_h - p.delta_h * v.h};
}

double schedule_after_attacked_attempt(double t_attempt, const TriggerParams& p)
{
    return t_attempt + p.dwell_kappa;
}

}  // namespace resopt

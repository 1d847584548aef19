#pragma once

#include <vector>

#include <Eigen/Dense>

#include "resopt/graph.hpp"
#include "resopt/plant.hpp"

namespace resopt {

struct AlgorithmParams {
    double alpha = 2.0;
    double beta = 1.0;

    void validate() const;
    bool operator==(const AlgorithmParams&) const = default;
};

/// Dynamic event-trigger parameters, identical for every agent.
struct TriggerParams {
    double sigma_g = 1.0;
    double sigma_h = 1.0;
    double theta_g = 0.5;
    double theta_h = 0.5;
    double delta_g = 0.5;
    double delta_h = 0.5;
    double k_g = 1.0;
    double k_h = 1.0;
    double eta_g0 = 1.0;
    double eta_h0 = 1.0;
    double dwell_kappa = 0.1;

    // Also enforces k_g > (1 - delta_g) / sigma_g and the h counterpart.
    void validate() const;
    bool operator==(const TriggerParams&) const = default;
};

/// Values each agent exposes to its in-neighbours: y, rho and z, either the
/// live samples (time-based) or the last successful broadcasts (event-based).
struct NeighborValues {
    std::vector<Eigen::VectorXd> y;
    std::vector<Eigen::VectorXd> rho;
    std::vector<Eigen::VectorXd> z;
};

struct ConsensusErrors {
    Eigen::VectorXd e_rho_z;
    Eigen::VectorXd e_y;
};

/// e_rho_z = sum_j a_ij (rho_i - rho_j + z_i - z_j), e_y = sum_j a_ij (y_i - y_j);
/// exact zero vectors when the agent is attacked.
ConsensusErrors consensus_errors_timebased(int i, const NeighborValues& v, const WeightedDigraph& g, bool attacked);

/// Same sums over the broadcast table (the agent's own and each neighbour's last
/// successful broadcast); exact zero vectors when the agent's governing
/// transmission attempt was attacked.
ConsensusErrors consensus_errors_eventbased(int i, const NeighborValues& broadcast, const WeightedDigraph& g,
                                            bool last_attempt_attacked);

struct ControlOutput {
    Eigen::VectorXd u;
    Eigen::VectorXd d_rho;  // = vartheta
    Eigen::VectorXd d_z;
};

/// u = -K x - (U - K X) rho + W vartheta with
/// vartheta = -grad - beta e_rho_z - alpha beta e_y, d_z = alpha beta e_y.
ControlOutput ctrl_derivative_timebased(const AgentModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& rho,
                                        const ConsensusErrors& e, const Eigen::VectorXd& grad,
                                        const AlgorithmParams& p);

/// Attack-free law: the consensus sums are formed directly from the neighbour
/// values and fed into the same control structure.
ControlOutput ctrl_derivative_attack_free(int i, const AgentModel& m, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& rho, const NeighborValues& v,
                                          const WeightedDigraph& g, const Eigen::VectorXd& grad,
                                          const AlgorithmParams& p);

struct TriggerValues {
    double g = 0.0;  // |e~_y|^2 - theta_g |e_y|^2
    double h = 0.0;  // |e~_rho_z|^2 - theta_h |e_rho_z|^2
};

/// Measurement errors e~_y = y^ - y, e~_rho_z = rho^ + z^ - (rho + z) against
/// the consensus errors e recomputed from broadcasts.
TriggerValues trigger_values(const Eigen::VectorXd& y, const Eigen::VectorXd& rho_plus_z,
                             const Eigen::VectorXd& y_hat, const Eigen::VectorXd& rho_plus_z_hat,
                             const ConsensusErrors& e, const TriggerParams& p);

// fire iff sigma_g g > eta_g or sigma_h h > eta_h
bool trigger_check(const TriggerValues& v, double eta_g, double eta_h, const TriggerParams& p);

struct EtaDerivative {
    double d_eta_g = 0.0;
    double d_eta_h = 0.0;
};

// -k eta - delta g after a successful attempt; frozen (0, 0) after an attacked one.
EtaDerivative eta_derivative(double eta_g, double eta_h, const TriggerValues& v, const TriggerParams& p,
                             bool last_attempt_attacked);

double schedule_after_attacked_attempt(double t_attempt, const TriggerParams& p);

}  // namespace resopt

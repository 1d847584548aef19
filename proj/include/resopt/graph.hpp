#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace resopt {

/// Weighted digraph on N vertices. weights(i, j) > 0 iff vertex i receives
/// information from vertex j, i.e. the edge (j, i) exists.
class WeightedDigraph {
public:
    explicit WeightedDigraph(Eigen::MatrixXd weights);

    int size() const { return static_cast<int>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    double weight(int i, int j) const { return weights_(i, j); }

private:
    Eigen::MatrixXd weights_;
};

/// Finite family of digraphs switched by a continuous-time Markov chain.
class GraphProcess {
public:
    GraphProcess(std::vector<WeightedDigraph> graphs, Eigen::MatrixXd generator,
                 Eigen::VectorXd initial_distribution);

    int num_modes() const { return static_cast<int>(graphs_.size()); }
    int num_vertices() const { return graphs_.front().size(); }
    const std::vector<WeightedDigraph>& graphs() const { return graphs_; }
    const WeightedDigraph& graph(int mode) const { return graphs_.at(mode); }
    const Eigen::MatrixXd& generator() const { return generator_; }
    const Eigen::VectorXd& initial_distribution() const { return initial_; }

private:
    std::vector<WeightedDigraph> graphs_;
    Eigen::MatrixXd generator_;
    Eigen::VectorXd initial_;
};

/// Piecewise-constant, right-continuous mode signal on [0, horizon).
struct SwitchingPath {
    std::vector<double> breakpoints;  // breakpoints.front() == 0
    std::vector<int> states;          // states[k] holds on [breakpoints[k], breakpoints[k+1])
    double horizon = 0.0;

    int state_at(double t) const;
    bool operator==(const SwitchingPath&) const = default;
};

struct StationaryWeighting {
    Eigen::VectorXd pi;  // positive, sums to one
    double min_cut = 0.0;

    double pi_min() const { return pi.minCoeff(); }
    double pi_max() const { return pi.maxCoeff(); }
};

struct QuadraticBound {
    double lhs = 0.0;  // xi' Q xi
    double rhs = 0.0;  // pi_min * c / N^2 * |xi|^2
};

Eigen::MatrixXd laplacian(const WeightedDigraph& g);

// Laplacian of the union (sum of the mode Laplacians).
Eigen::MatrixXd union_laplacian(const GraphProcess& p);

// (L_un + L_un') / 2
Eigen::MatrixXd mirror_union_laplacian(const GraphProcess& p);

/// Exact minimum cut of a symmetric Laplacian by enumerating every nonempty
/// proper vertex subset. The cut weight of S is the sum of -L(i, j) over
/// i in S, j outside S. Throws CapabilityError for more than 20 vertices.
double minimum_cut(const Eigen::MatrixXd& mirror);

/// Common positive stationary vector pi with pi' L_p = 0 for every mode,
/// taken from the smallest right singular vector of the stacked [L_1'; ...;
/// L_s'] system, plus the minimum cut of the union mirror. Throws
/// AssumptionViolated when no positive common vector exists (residual above
/// 1e-9) or when the minimum cut is not positive.
StationaryWeighting stationary_weighting(const GraphProcess& p);

// Pi L + L' Pi with Pi = diag(pi).
Eigen::MatrixXd weighted_quadratic_matrix(const Eigen::MatrixXd& lap, const Eigen::VectorXd& pi);

/// Both sides of xi' Q xi >= (pi_min c / N^2) |xi|^2. Requires pi' xi = 0
/// within 1e-9 (PreconditionError otherwise).
QuadraticBound quadratic_cut_bound(const Eigen::MatrixXd& q, const Eigen::VectorXd& pi, double cut,
                                   const Eigen::VectorXd& xi);

/// Samples the mode signal: initial mode from the initial distribution,
/// exponential holding with rate -gamma_pp, jump to q with probability
/// gamma_pq / -gamma_pp. Deterministic given the seed.
SwitchingPath sample_switching_path(const GraphProcess& p, double horizon, std::uint64_t seed);

}  // namespace resopt

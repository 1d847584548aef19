#include "resopt/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "resopt/errors.hpp"
#include "resopt/rng.hpp"

namespace resopt {

namespace {

constexpr double kStationaryTol = 1e-9;
constexpr double kDistributionTol = 1e-12;
constexpr int kMaxCutVertices = 20;

}  // namespace

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd weights) : weights_(std::move(weights))
{
    if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
        throw ValidationError("digraph weight matrix must be square and nonempty");
    }
    for (int i = 0; i < weights_.rows(); ++i) {
        for (int j = 0; j < weights_.cols(); ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw ValidationError("digraph weight (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") must be finite and nonnegative");
            }
            if (i == j && w != 0.0) {
                throw ValidationError("digraph diagonal weight " + std::to_string(i) + " must be zero");
            }
        }
    }
}

GraphProcess::GraphProcess(std::vector<WeightedDigraph> graphs, Eigen::MatrixXd generator,
                           Eigen::VectorXd initial_distribution)
    : graphs_(std::move(graphs)), generator_(std::move(generator)), initial_(std::move(initial_distribution))
{
    if (graphs_.empty()) {
        throw ValidationError("graph process needs at least one graph");
    }
    const int n = graphs_.front().size();
    for (std::size_t p = 0; p < graphs_.size(); ++p) {
        if (graphs_[p].size() != n) {
            throw ValidationError("graph " + std::to_string(p) + " has " + std::to_string(graphs_[p].size()) +
                                  " vertices, expected " + std::to_string(n));
        }
    }
    const int s = num_modes();
    if (generator_.rows() != s || generator_.cols() != s) {
        throw ValidationError("generator must be " + std::to_string(s) + "x" + std::to_string(s));
    }
    for (int p = 0; p < s; ++p) {
        double row = 0.0;
        double scale = 0.0;
        for (int q = 0; q < s; ++q) {
            const double g = generator_(p, q);
            if (!std::isfinite(g)) {
                throw ValidationError("generator entry (" + std::to_string(p) + "," + std::to_string(q) +
                                      ") is not finite");
            }
            if (p != q && g < 0.0) {
                throw ValidationError("generator off-diagonal (" + std::to_string(p) + "," + std::to_string(q) +
                                      ") is negative");
            }
            row += g;
            scale += std::abs(g);
        }
        if (std::abs(row) > 1e-12 * std::max(1.0, scale)) {
            throw ValidationError("generator row " + std::to_string(p) + " sums to " + std::to_string(row) +
                                  ", expected 0");
        }
    }
    if (initial_.size() != s) {
        throw ValidationError("initial distribution must have " + std::to_string(s) + " entries");
    }
    if ((initial_.array() < 0.0).any() || std::abs(initial_.sum() - 1.0) > kDistributionTol) {
        throw ValidationError("initial distribution must be nonnegative and sum to 1");
    }
}

int SwitchingPath::state_at(double t) const
{
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    if (it == breakpoints.begin()) {
        return states.front();
    }
    return states[static_cast<std::size_t>(std::distance(breakpoints.begin(), it)) - 1];
}

Eigen::MatrixXd laplacian(const WeightedDigraph& g)
{
    const Eigen::MatrixXd& a = g.weights();
    Eigen::MatrixXd lap = -a;
    for (int i = 0; i < a.rows(); ++i) {
        double degree = 0.0;
        for (int j = 0; j < a.cols(); ++j) {
            if (j != i) {
                degree += a(i, j);
            }
        }
        lap(i, i) = degree;
    }
    return lap;
}

Eigen::MatrixXd union_laplacian(const GraphProcess& p)
{
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(p.num_vertices(), p.num_vertices());
    for (const auto& g : p.graphs()) {
        weights += g.weights();
    }
    return laplacian(WeightedDigraph(weights));
}

Eigen::MatrixXd mirror_union_laplacian(const GraphProcess& p)
{
    const Eigen::MatrixXd lun = union_laplacian(p);
    return 0.5 * (lun + lun.transpose());
}

double minimum_cut(const Eigen::MatrixXd& mirror)
{
    const int n = static_cast<int>(mirror.rows());
    if (n != mirror.cols()) {
        throw ValidationError("minimum_cut needs a square matrix");
    }
    if (n > kMaxCutVertices) {
        throw CapabilityError("minimum_cut enumerates subsets exhaustively; " + std::to_string(n) +
                              " vertices exceeds the limit of " + std::to_string(kMaxCutVertices));
    }
    if (n < 2) {
        return 0.0;
    }
    // Cut(S) == Cut(complement), so the last vertex stays outside S. Subsets
    // are visited in Gray-code order and the cut is updated by one vertex.
    const int free = n - 1;
    std::vector<char> in_set(static_cast<std::size_t>(n), 0);
    double cut = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t count = std::uint64_t{1} << free;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int v = std::countr_zero(k);
        double towards_set = 0.0;
        double total = 0.0;
        for (int u = 0; u < n; ++u) {
            if (u == v) {
                continue;
            }
            const double w = -0.5 * (mirror(v, u) + mirror(u, v));
            total += w;
            if (in_set[static_cast<std::size_t>(u)]) {
                towards_set += w;
            }
        }
        if (in_set[static_cast<std::size_t>(v)]) {
            cut -= total - 2.0 * towards_set;
            in_set[static_cast<std::size_t>(v)] = 0;
        } else {
            cut += total - 2.0 * towards_set;
            in_set[static_cast<std::size_t>(v)] = 1;
        }
        best = std::min(best, cut);
    }
    // incremental sums can leave a few ulps of noise around an exact zero
    return std::abs(best) < 1e-12 ? 0.0 : best;
}

StationaryWeighting stationary_weighting(const GraphProcess& p)
{
    const int n = p.num_vertices();
    const int s = p.num_modes();

    StationaryWeighting out;
    out.min_cut = minimum_cut(mirror_union_laplacian(p));
    if (!(out.min_cut > 0.0)) {
        throw AssumptionViolated("union graph has minimum cut " + std::to_string(out.min_cut) +
                                 "; joint connectivity requires a positive cut");
    }

    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(s) * n, n);
    for (int m = 0; m < s; ++m) {
        stacked.block(static_cast<Eigen::Index>(m) * n, 0, n, n) = laplacian(p.graph(m)).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    Eigen::VectorXd pi = svd.matrixV().col(n - 1);
    if (pi.sum() < 0.0) {
        pi = -pi;
    }
    pi /= pi.sum();

    double residual = 0.0;
    for (int m = 0; m < s; ++m) {
        residual = std::max(residual, (laplacian(p.graph(m)).transpose() * pi).cwiseAbs().maxCoeff());
    }
    if (!(residual < kStationaryTol) || !(pi.minCoeff() > 0.0)) {
        throw AssumptionViolated("no common positive stationary distribution (residual " +
                                 std::to_string(residual) + ", min entry " + std::to_string(pi.minCoeff()) + ")");
    }
    out.pi = pi;
    return out;
}

Eigen::MatrixXd weighted_quadratic_matrix(const Eigen::MatrixXd& lap, const Eigen::VectorXd& pi)
{
    const Eigen::MatrixXd weighted = pi.asDiagonal() * lap;
    return weighted + weighted.transpose();
}

QuadraticBound quadratic_cut_bound(const Eigen::MatrixXd& q, const Eigen::VectorXd& pi, double cut,
                                   const Eigen::VectorXd& xi)
{
    const auto n = q.rows();
    if (q.cols() != n || pi.size() != n || xi.size() != n) {
        throw ValidationError("quadratic_cut_bound: dimension mismatch");
    }
    const double proj = pi.dot(xi);
    if (std::abs(proj) > 1e-9) {
        throw PreconditionError("quadratic_cut_bound: xi is not orthogonal to pi (pi'xi = " +
                                std::to_string(proj) + ")");
    }
    QuadraticBound b;
    b.lhs = xi.dot(q * xi);
    b.rhs = pi.minCoeff() * cut / static_cast<double>(n * n) * xi.squaredNorm();
    return b;
}

SwitchingPath sample_switching_path(const GraphProcess& p, double horizon, std::uint64_t seed)
{
    if (!(horizon > 0.0)) {
        throw PreconditionError("sample_switching_path: horizon must be positive");
    }
    Rng rng(seed);
    const Eigen::VectorXd& init = p.initial_distribution();
    SwitchingPath path;
    path.horizon = horizon;

    int state = static_cast<int>(rng.categorical(std::span<const double>(init.data(), init.size())));
    double t = 0.0;
    path.breakpoints.push_back(0.0);
    path.states.push_back(state);

    const Eigen::MatrixXd& gen = p.generator();
    std::vector<double> jump(static_cast<std::size_t>(p.num_modes()));
    for (;;) {
        const double rate = -gen(state, state);
        t += rng.exponential(rate);
        if (!(t < horizon)) {
            break;
        }
        for (int q = 0; q < p.num_modes(); ++q) {
            jump[static_cast<std::size_t>(q)] = q == state ? 0.0 : gen(state, q);
        }
        state = static_cast<int>(rng.categorical(jump));
        path.breakpoints.push_back(t);
        path.states.push_back(state);
    }
    return path;
}

}  // namespace resopt

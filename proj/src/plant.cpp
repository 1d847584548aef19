#include "resopt/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resopt/errors.hpp"

namespace resopt {

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kResidualTol = 1e-9;
constexpr double kHurwitzMargin = 1e-9;

int numerical_rank(const Eigen::MatrixXd& m)
{
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    const double cutoff = kRankTol * sv(0);
    return static_cast<int>((sv.array() > cutoff).count());
}

void check_dims(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C)
{
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw ValidationError("A must be square and nonempty");
    }
    if (B.rows() != A.rows() || B.cols() == 0) {
        throw ValidationError("B must have " + std::to_string(A.rows()) + " rows and at least one column");
    }
    if (C.cols() != A.rows() || C.rows() == 0) {
        throw ValidationError("C must have " + std::to_string(A.rows()) + " columns and at least one row");
    }
}

// Kronecker product I_q (x) M
Eigen::MatrixXd block_diag(const Eigen::MatrixXd& m, Eigen::Index q)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows() * q, m.cols() * q);
    for (Eigen::Index k = 0; k < q; ++k) {
        out.block(k * m.rows(), k * m.cols(), m.rows(), m.cols()) = m;
    }
    return out;
}

}  // namespace

bool check_rank_condition(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C)
{
    check_dims(A, B, C);
    const auto n = A.rows();
    const auto p = B.cols();
    const auto q = C.rows();
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(q + n, 2 * p);
    block.topLeftCorner(q, p) = C * B;
    block.bottomLeftCorner(n, p) = -A * B;
    block.bottomRightCorner(n, p) = B;
    return numerical_rank(block) == n + q;
}

bool is_controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
    const auto n = A.rows();
    Eigen::MatrixXd ctrb(n, n * B.cols());
    Eigen::MatrixXd term = B;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.middleCols(k * B.cols(), B.cols()) = term;
        term = A * term;
    }
    return numerical_rank(ctrb) == n;
}

RegulatorResiduals regulation_residuals(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                        const RegulatorSolution& s)
{
    const auto q = C.rows();
    RegulatorResiduals r;
    r.bu_ax = (B * s.U - A * s.X).norm();
    r.bw_x = (B * s.W - s.X).norm();
    r.cx_i = (C * s.X - Eigen::MatrixXd::Identity(q, q)).norm();
    return r;
}

RegulatorSolution solve_regulation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C)
{
    check_dims(A, B, C);
    const auto n = A.rows();
    const auto p = B.cols();
    const auto q = C.rows();

    // Unknowns stacked column-major: [vec U; vec W; vec X].
    const auto nu = p * q;
    const auto nx = n * q;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * nx + q * q, 2 * nu + nx);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M.rows());

    M.block(0, 0, nx, nu) = block_diag(B, q);
    M.block(0, 2 * nu, nx, nx) = -block_diag(A, q);
    M.block(nx, nu, nx, nu) = block_diag(B, q);
    M.block(nx, 2 * nu, nx, nx) = -Eigen::MatrixXd::Identity(nx, nx);
    M.block(2 * nx, 2 * nu, q * q, nx) = block_diag(C, q);
    rhs.tail(q * q) = Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd::Identity(q, q).eval().data(), q * q);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(kRankTol);
    const Eigen::VectorXd z = cod.solve(rhs);

    RegulatorSolution s;
    s.U = Eigen::Map<const Eigen::MatrixXd>(z.data(), p, q);
    s.W = Eigen::Map<const Eigen::MatrixXd>(z.data() + nu, p, q);
    s.X = Eigen::Map<const Eigen::MatrixXd>(z.data() + 2 * nu, n, q);

    const double res = regulation_residuals(A, B, C, s).max();
    if (!(res < kResidualTol)) {
        throw NoSolutionError("regulator equations have no solution (least-squares residual " + std::to_string(res) +
                              ")");
    }
    return s;
}

HurwitzCheck is_hurwitz(const Eigen::MatrixXd& M)
{
    if (M.rows() == 0 || M.rows() != M.cols()) {
        throw ValidationError("is_hurwitz needs a nonempty square matrix");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    HurwitzCheck h;
    h.spectral_abscissa = es.eigenvalues().real().maxCoeff();
    h.hurwitz = h.spectral_abscissa < -kHurwitzMargin;
    return h;
}

AgentModel::AgentModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd K,
                       std::optional<RegulatorSolution> pinned)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), K_(std::move(K))
{
    check_dims(A_, B_, C_);
    const auto n = A_.rows();
    const auto p = B_.cols();
    const auto q = C_.rows();
    if (K_.rows() != p || K_.cols() != n) {
        throw ValidationError("K must be " + std::to_string(p) + "x" + std::to_string(n));
    }
    if (!check_rank_condition(A_, B_, C_)) {
        throw ValidationError("rank condition rank[[CB, 0], [-AB, B]] = n + q fails");
    }
    if (!is_controllable(A_, B_)) {
        warnings_.push_back("(A, B) is not controllable");
    }
    const HurwitzCheck h = is_hurwitz(A_ - B_ * K_);
    abscissa_ = h.spectral_abscissa;
    if (!h.hurwitz) {
        throw ValidationError("A - B K is not Hurwitz (spectral abscissa " + std::to_string(h.spectral_abscissa) +
                              ")");
    }
    if (pinned) {
        if (pinned->U.rows() != p || pinned->U.cols() != q || pinned->W.rows() != p || pinned->W.cols() != q ||
            pinned->X.rows() != n || pinned->X.cols() != q) {
            throw ValidationError("pinned U, W must be " + std::to_string(p) + "x" + std::to_string(q) +
                                  " and X must be " + std::to_string(n) + "x" + std::to_string(q));
        }
        const double res = regulation_residuals(A_, B_, C_, *pinned).max();
        if (!(res < kResidualTol)) {
            throw ValidationError("pinned (U, W, X) violates the regulator equations (residual " +
                                  std::to_string(res) + ")");
        }
        reg_ = *pinned;
        pinned_ = true;
    } else {
        reg_ = solve_regulation(A_, B_, C_);
    }
    feedforward_ = reg_.U - K_ * reg_.X;
}

Eigen::VectorXd plant_derivative(const AgentModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u)
{
    if (x.size() != m.state_dim() || u.size() != m.input_dim()) {
        throw ValidationError("plant_derivative: state or input dimension mismatch");
    }
    return m.A() * x + m.B() * u;
}

Eigen::VectorXd plant_output(const AgentModel& m, const Eigen::VectorXd& x)
{
    if (x.size() != m.state_dim()) {
        throw ValidationError("plant_output: state dimension mismatch");
    }
    return m.C() * x;
}

}  // namespace resopt

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace resopt {

struct RegulatorSolution {
    Eigen::MatrixXd U;  // p x q
    Eigen::MatrixXd W;  // p x q
    Eigen::MatrixXd X;  // n x q
};

struct RegulatorResiduals {
    double bu_ax = 0.0;  // |B U - A X|
    double bw_x = 0.0;   // |B W - X|
    double cx_i = 0.0;   // |C X - I|
    double max() const { return std::max({bu_ax, bw_x, cx_i}); }
};

struct HurwitzCheck {
    bool hurwitz = false;
    double spectral_abscissa = 0.0;
};

/// rank [[C B, 0], [-A B, B]] == n + q, numerical rank with threshold 1e-9 sigma_max.
bool check_rank_condition(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C);

// Kalman rank test of (A, B), same singular-value threshold.
bool is_controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Minimum-norm solution of B U = A X, B W = X, C X = I as one stacked
/// least-squares system. Throws NoSolutionError when the residual exceeds 1e-9.
RegulatorSolution solve_regulation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C);

RegulatorResiduals regulation_residuals(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                        const RegulatorSolution& s);

// Hurwitz iff the largest real part of the spectrum is below -1e-9.
HurwitzCheck is_hurwitz(const Eigen::MatrixXd& M);

/// One heterogeneous agent x' = A x + B u, y = C x with its feedback gain and
/// regulator solution. Construction enforces the rank condition, a Hurwitz
/// A - B K and regulator residuals below 1e-9.
class AgentModel {
public:
    AgentModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd K,
               std::optional<RegulatorSolution> pinned = std::nullopt);

    int state_dim() const { return static_cast<int>(A_.rows()); }
    int input_dim() const { return static_cast<int>(B_.cols()); }
    int output_dim() const { return static_cast<int>(C_.rows()); }

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& K() const { return K_; }
    const Eigen::MatrixXd& U() const { return reg_.U; }
    const Eigen::MatrixXd& W() const { return reg_.W; }
    const Eigen::MatrixXd& X() const { return reg_.X; }
    // U - K X, the reference feedforward gain on rho
    const Eigen::MatrixXd& feedforward() const { return feedforward_; }
    bool regulator_pinned() const { return pinned_; }
    double closed_loop_abscissa() const { return abscissa_; }
    // Non-fatal findings, e.g. an uncontrollable (A, B) pair.
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    Eigen::MatrixXd A_, B_, C_, K_;
    RegulatorSolution reg_;
    Eigen::MatrixXd feedforward_;
    bool pinned_ = false;
    double abscissa_ = 0.0;
    std::vector<std::string> warnings_;
};

Eigen::VectorXd plant_derivative(const AgentModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u);
Eigen::VectorXd plant_output(const AgentModel& m, const Eigen::VectorXd& x);

}  // namespace resopt

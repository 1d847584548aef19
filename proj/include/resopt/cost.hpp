#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace resopt {

enum class CostKind { exp_pair, quartic, log_quadratic, custom_polynomial };

std::string to_string(CostKind k);
CostKind cost_kind_from_string(const std::string& s);

/// Separable convex cost f(theta) = sum_k phi(theta_k) over the q coordinates.
///
///   exp_pair           params {c1, k1, c2, k2}: c1 e^{k1 t} + c2 e^{k2 t}
///   quartic            params {a, b, c}:        a t^4 + b t^2 + c
///   log_quadratic      params {a, b}:           a t^2 ln(1 + t^2) + b t^2
///   custom_polynomial  params {c0, c1, ...}:    c0 + c1 t + c2 t^2 + ...
struct CostSpec {
    CostKind kind = CostKind::custom_polynomial;
    std::vector<double> params;
    int dimension = 1;
    // working box for curvature estimates, applied to every coordinate
    double box_lo = -10.0;
    double box_hi = 10.0;

    // Throws ValidationError on a wrong parameter count or bad box.
    void validate() const;
    bool operator==(const CostSpec&) const = default;
};

// One coordinate of the separable cost and its first two derivatives.
double scalar_value(const CostSpec& c, double t);
double scalar_derivative(const CostSpec& c, double t);
double scalar_curvature(const CostSpec& c, double t);

double value(const CostSpec& c, const Eigen::VectorXd& y);
/// Analytic gradient. Throws ValidationError on non-finite input.
Eigen::VectorXd gradient(const CostSpec& c, const Eigen::VectorXd& y);

struct RegularityEstimate {
    double iota = 0.0;       // strong convexity lower bound on the box
    double lipschitz = 0.0;  // gradient Lipschitz upper bound on the box
    double lo = 0.0;
    double hi = 0.0;
};

/// Min and max of the second derivative over 10^4 equal grid intervals of
/// [lo, hi]. Throws ConvexityViolated if the curvature is not positive at some
/// grid point.
RegularityEstimate estimate_regularity(const CostSpec& c, double lo, double hi);
RegularityEstimate estimate_regularity(const CostSpec& c);

/// Minimizer of the team cost sum_i f_i. Each coordinate is found by
/// bisection on the summed derivative after expanding a bracket outwards
/// from [-1, 1]; throws UnboundedError if no sign change appears within
/// [-1e10, 1e10].
Eigen::VectorXd centralized_optimum(const std::vector<CostSpec>& costs, double tolerance = 1e-12);

// sum_i f_i'(t) for one coordinate
double team_derivative(const std::vector<CostSpec>& costs, double t);

}  // namespace resopt

#include "resopt/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resopt/errors.hpp"

namespace resopt {

namespace {

constexpr int kGridIntervals = 10000;
constexpr double kBracketLimit = 1e10;

// Horner evaluation of sum_k coef[k] t^k and its first two derivatives.
double poly(const std::vector<double>& coef, double t, int order)
{
    double acc = 0.0;
    for (std::size_t k = coef.size(); k-- > static_cast<std::size_t>(order);) {
        double factor = 1.0;
        for (int m = 0; m < order; ++m) {
            factor *= static_cast<double>(k - static_cast<std::size_t>(m));
        }
        acc = acc * t + factor * coef[k];
    }
    return acc;
}

}  // namespace

std::string to_string(CostKind k)
{
    switch (k) {
    case CostKind::exp_pair:
        return "exp_pair";
    case CostKind::quartic:
        return "quartic";
    case CostKind::log_quadratic:
        return "log_quadratic";
    case CostKind::custom_polynomial:
        return "custom_polynomial";
    }
    return "unknown";
}

CostKind cost_kind_from_string(const std::string& s)
{
    if (s == "exp_pair") {
        return CostKind::exp_pair;
    }
    if (s == "quartic") {
        return CostKind::quartic;
    }
    if (s == "log_quadratic") {
        return CostKind::log_quadratic;
    }
    if (s == "custom_polynomial") {
        return CostKind::custom_polynomial;
    }
    throw ValidationError("unknown cost kind '" + s +
                          "' (expected exp_pair, quartic, log_quadratic or custom_polynomial)");
}

void CostSpec::validate() const
{
    std::size_t want = 0;
    switch (kind) {
    case CostKind::exp_pair:
        want = 4;
        break;
    case CostKind::quartic:
        want = 3;
        break;
    case CostKind::log_quadratic:
        want = 2;
        break;
    case CostKind::custom_polynomial:
        if (params.empty()) {
            throw ValidationError("custom_polynomial needs at least one coefficient");
        }
        want = params.size();
        break;
    }
    if (params.size() != want) {
        throw ValidationError(to_string(kind) + " takes " + std::to_string(want) + " parameters, got " +
                              std::to_string(params.size()));
    }
    for (double p : params) {
        if (!std::isfinite(p)) {
            throw ValidationError(to_string(kind) + " parameters must be finite");
        }
    }
    if (dimension < 1) {
        throw ValidationError("cost dimension must be at least 1");
    }
    if (!std::isfinite(box_lo) || !std::isfinite(box_hi) || !(box_lo < box_hi)) {
        throw ValidationError("cost working box needs finite lo < hi");
    }
}

double scalar_value(const CostSpec& c, double t)
{
    const auto& p = c.params;
    switch (c.kind) {
    case CostKind::exp_pair:
        return p[0] * std::exp(p[1] * t) + p[2] * std::exp(p[3] * t);
    case CostKind::quartic:
        return p[0] * t * t * t * t + p[1] * t * t + p[2];
    case CostKind::log_quadratic:
        return p[0] * t * t * std::log1p(t * t) + p[1] * t * t;
    case CostKind::custom_polynomial:
        return poly(p, t, 0);
    }
    return 0.0;
}

double scalar_derivative(const CostSpec& c, double t)
{
    const auto& p = c.params;
    switch (c.kind) {
    case CostKind::exp_pair:
        return p[0] * p[1] * std::exp(p[1] * t) + p[2] * p[3] * std::exp(p[3] * t);
    case CostKind::quartic:
        return 4.0 * p[0] * t * t * t + 2.0 * p[1] * t;
    case CostKind::log_quadratic: {
        const double s = t * t;
        return p[0] * (2.0 * t * std::log1p(s) + 2.0 * t * s / (1.0 + s)) + 2.0 * p[1] * t;
    }
    case CostKind::custom_polynomial:
        return poly(p, t, 1);
    }
    return 0.0;
}

double scalar_curvature(const CostSpec& c, double t)
{
    const auto& p = c.params;
    switch (c.kind) {
    case CostKind::exp_pair:
        return p[0] * p[1] * p[1] * std::exp(p[1] * t) + p[2] * p[3] * p[3] * std::exp(p[3] * t);
    case CostKind::quartic:
        return 12.0 * p[0] * t * t + 2.0 * p[1];
    case CostKind::log_quadratic: {
        const double s = t * t;
        const double d = 1.0 + s;
        return p[0] * (2.0 * std::log1p(s) + 4.0 * s / d + (6.0 * s + 2.0 * s * s) / (d * d)) + 2.0 * p[1];
    }
    case CostKind::custom_polynomial:
        return poly(p, t, 2);
    }
    return 0.0;
}

double value(const CostSpec& c, const Eigen::VectorXd& y)
{
    if (y.size() != c.dimension) {
        throw ValidationError("cost value: expected dimension " + std::to_string(c.dimension));
    }
    double total = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        total += scalar_value(c, y(k));
    }
    return total;
}

Eigen::VectorXd gradient(const CostSpec& c, const Eigen::VectorXd& y)
{
    if (y.size() != c.dimension) {
        throw ValidationError("cost gradient: expected dimension " + std::to_string(c.dimension));
    }
    if (!y.allFinite()) {
        throw ValidationError("cost gradient: non-finite argument");
    }
    Eigen::VectorXd g(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        g(k) = scalar_derivative(c, y(k));
    }
    return g;
}

RegularityEstimate estimate_regularity(const CostSpec& c, double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw ValidationError("estimate_regularity needs a nonempty finite box");
    }
    RegularityEstimate r;
    r.lo = lo;
    r.hi = hi;
    r.iota = std::numeric_limits<double>::infinity();
    r.lipschitz = 0.0;
    for (int k = 0; k <= kGridIntervals; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) / kGridIntervals;
        const double curv = scalar_curvature(c, t);
        if (!(curv > 0.0)) {
            throw ConvexityViolated(to_string(c.kind) + " cost has curvature " + std::to_string(curv) + " at " +
                                    std::to_string(t) + "; not strongly convex on [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
        }
        r.iota = std::min(r.iota, curv);
        r.lipschitz = std::max(r.lipschitz, curv);
    }
    return r;
}

RegularityEstimate estimate_regularity(const CostSpec& c)
{
    return estimate_regularity(c, c.box_lo, c.box_hi);
}

double team_derivative(const std::vector<CostSpec>& costs, double t)
{
    double g = 0.0;
    for (const auto& c : costs) {
        g += scalar_derivative(c, t);
    }
    return g;
}

Eigen::VectorXd centralized_optimum(const std::vector<CostSpec>& costs, double tolerance)
{
    if (costs.empty()) {
        throw ValidationError("centralized_optimum needs at least one cost");
    }
    const int q = costs.front().dimension;
    for (const auto& c : costs) {
        if (c.dimension != q) {
            throw ValidationError("centralized_optimum: costs disagree on dimension");
        }
    }

    double lo = -1.0;
    double hi = 1.0;
    double glo = team_derivative(costs, lo);
    double ghi = team_derivative(costs, hi);
    while (!(glo <= 0.0 && ghi >= 0.0)) {
        if (std::abs(lo) >= kBracketLimit) {
            throw UnboundedError("team cost derivative has no sign change in [-1e10, 1e10]");
        }
        lo *= 2.0;
        hi *= 2.0;
        glo = team_derivative(costs, lo);
        ghi = team_derivative(costs, hi);
    }

    double best = std::abs(glo) < std::abs(ghi) ? lo : hi;
    double best_abs = std::min(std::abs(glo), std::abs(ghi));
    while (best_abs >= tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double gm = team_derivative(costs, mid);
        if (std::abs(gm) < best_abs) {
            best = mid;
            best_abs = std::abs(gm);
        }
        if (gm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Eigen::VectorXd::Constant(q, best);
}

}  // namespace resopt

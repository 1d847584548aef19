#pragma once

#include <optional>
#include <vector>

namespace resopt {

struct AttackInterval {
    double start = 0.0;     // a_m
    double duration = 0.0;  // tau_m
    double end() const { return start + duration; }
    bool operator==(const AttackInterval&) const = default;
};

/// Ordered, strictly separated DoS intervals [a_m, a_m + tau_m) on [0, horizon].
class AttackSchedule {
public:
    AttackSchedule() = default;
    AttackSchedule(std::vector<AttackInterval> intervals, double horizon);

    /// Expands a periodic on/off template: bursts of `active` seconds every
    /// `period` seconds starting at `phase`, clipped to the horizon. A duty
    /// cycle of one (active >= period) becomes a single interval from the
    /// phase to the horizon.
    static AttackSchedule periodic(double period, double active, double phase, double horizon);

    const std::vector<AttackInterval>& intervals() const { return intervals_; }
    double horizon() const { return horizon_; }
    bool empty() const { return intervals_.empty(); }

    // Throws RangeError outside [0, horizon].
    bool active(double t) const;

private:
    std::vector<AttackInterval> intervals_;
    double horizon_ = 0.0;
};

struct AttackMetrics {
    int count = 0;                // attacks starting in [t1, t2)
    double total_duration = 0.0;  // measure of attacked time inside [t1, t2)
    double frequency = 0.0;       // count / (t2 - t1)
};

AttackMetrics attack_metrics(const AttackSchedule& s, double t1, double t2);

/// Resilience budget. The thresholds T*_f and T*_a come either from the
/// rate constants (lambda_a, lambda_b, mu, eta_star) or are given directly.
struct AttackBudget {
    std::optional<double> lambda_a;
    std::optional<double> lambda_b;
    std::optional<double> mu;
    std::optional<double> eta_star;
    std::optional<double> t_f_star;
    std::optional<double> t_a_star;
    double n0 = 1.0;
    double t0 = 0.0;
    double kappa_star = 0.0;

    void validate() const;
    bool has_rates() const { return lambda_a && lambda_b && mu && eta_star; }

    // ln(mu) / eta_star, plus (lambda_a + lambda_b) kappa_star / eta_star for
    // the event-triggered variant.
    double frequency_threshold(bool event_variant) const;
    // (lambda_a + lambda_b) / (lambda_a - eta_star)
    double duration_threshold() const;
};

struct ConditionReport {
    double threshold = 0.0;  // T*_f or T*_a
    double tightest = 0.0;   // smallest T_f / T_a the schedule admits (+inf when unconstrained)
    bool pass = false;
};

ConditionReport check_frequency_condition(const AttackSchedule& s, const AttackBudget& b, double t1, double t2,
                                          bool event_variant = false);

ConditionReport check_duration_condition(const AttackSchedule& s, const AttackBudget& b, double t1, double t2,
                                         bool event_variant);

}  // namespace resopt

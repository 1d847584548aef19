#include "resopt/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resopt/errors.hpp"

namespace resopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double overlap(double a0, double a1, double b0, double b1)
{
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Half-open intervals after inflating every burst by `extra` and merging
// whatever now overlaps.
std::vector<AttackInterval> inflated(const std::vector<AttackInterval>& in, double extra)
{
    std::vector<AttackInterval> out;
    for (const auto& iv : in) {
        AttackInterval grown{iv.start, iv.duration + extra};
        if (!out.empty() && grown.start <= out.back().end()) {
            out.back().duration = std::max(out.back().end(), grown.end()) - out.back().start;
        } else {
            out.push_back(grown);
        }
    }
    return out;
}

double measure(const std::vector<AttackInterval>& ivs, double s, double e)
{
    double total = 0.0;
    for (const auto& iv : ivs) {
        total += overlap(iv.start, iv.end(), s, e);
    }
    return total;
}

void check_window(double t1, double t2)
{
    if (!(t2 > t1) || t1 < 0.0) {
        throw RangeError("attack window needs t2 > t1 >= 0 (got [" + std::to_string(t1) + ", " +
                         std::to_string(t2) + "))");
    }
}

}  // namespace

AttackSchedule::AttackSchedule(std::vector<AttackInterval> intervals, double horizon)
    : intervals_(std::move(intervals)), horizon_(horizon)
{
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw ValidationError("attack schedule horizon must be positive and finite");
    }
    for (std::size_t m = 0; m < intervals_.size(); ++m) {
        const auto& iv = intervals_[m];
        if (!std::isfinite(iv.start) || !std::isfinite(iv.duration) || iv.start < 0.0 || iv.duration < 0.0) {
            throw ValidationError("attack interval " + std::to_string(m) +
                                  " needs finite start >= 0 and duration >= 0");
        }
        if (m > 0 && !(iv.start > intervals_[m - 1].end())) {
            throw ValidationError("attack interval " + std::to_string(m) + " starts at " + std::to_string(iv.start) +
                                  ", overlapping or touching interval " + std::to_string(m - 1) + " which ends at " +
                                  std::to_string(intervals_[m - 1].end()));
        }
    }
}

AttackSchedule AttackSchedule::periodic(double period, double active, double phase, double horizon)
{
    if (!(period > 0.0) || active < 0.0 || phase < 0.0) {
        throw ValidationError("periodic attack template needs period > 0, active >= 0, phase >= 0");
    }
    std::vector<AttackInterval> ivs;
    if (active >= period) {
        if (phase < horizon) {
            ivs.push_back({phase, horizon - phase});
        }
        return AttackSchedule(std::move(ivs), horizon);
    }
    for (long k = 0;; ++k) {
        const double start = phase + static_cast<double>(k) * period;
        if (!(start < horizon)) {
            break;
        }
        ivs.push_back({start, std::min(active, horizon - start)});
    }
    return AttackSchedule(std::move(ivs), horizon);
}

bool AttackSchedule::active(double t) const
{
    if (!(t >= 0.0) || t > horizon_) {
        throw RangeError("attack query time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
    }
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const AttackInterval& iv) { return v < iv.start; });
    if (it == intervals_.begin()) {
        return false;
    }
    --it;
    return t < it->end();
}

AttackMetrics attack_metrics(const AttackSchedule& s, double t1, double t2)
{
    check_window(t1, t2);
    AttackMetrics m;
    for (const auto& iv : s.intervals()) {
        if (iv.start >= t1 && iv.start < t2) {
            ++m.count;
        }
        m.total_duration += overlap(iv.start, iv.end(), t1, t2);
    }
    m.frequency = static_cast<double>(m.count) / (t2 - t1);
    return m;
}

void AttackBudget::validate() const
{
    if (lambda_a || lambda_b || mu || eta_star) {
        if (!has_rates()) {
            throw ValidationError("attack budget rates need all of lambda_a, lambda_b, mu, eta_star");
        }
        if (!(*eta_star > 0.0) || !(*eta_star < *lambda_a)) {
            throw ValidationError("attack budget needs 0 < eta_star < lambda_a");
        }
        if (!(*lambda_b > 0.0)) {
            throw ValidationError("attack budget needs lambda_b > 0");
        }
        if (!(*mu >= 1.0)) {
            throw ValidationError("attack budget needs mu >= 1");
        }
    }
    if (!has_rates() && (!t_f_star || !t_a_star)) {
        throw ValidationError("attack budget needs either the rate constants or both t_f_star and t_a_star");
    }
    if (t_f_star && !(*t_f_star >= 0.0)) {
        throw ValidationError("t_f_star must be nonnegative");
    }
    if (t_a_star && !(*t_a_star >= 0.0)) {
        throw ValidationError("t_a_star must be nonnegative");
    }
    if (!(n0 >= 0.0) || !(t0 >= 0.0) || !(kappa_star >= 0.0)) {
        throw ValidationError("attack budget needs n0, t0, kappa_star >= 0");
    }
}

double AttackBudget::frequency_threshold(bool event_variant) const
{
    if (t_f_star) {
        return *t_f_star;
    }
    double t = std::log(*mu) / *eta_star;
    if (event_variant) {
        t += (*lambda_a + *lambda_b) * kappa_star / *eta_star;
    }
    return t;
}

double AttackBudget::duration_threshold() const
{
    if (t_a_star) {
        return *t_a_star;
    }
    return (*lambda_a + *lambda_b) / (*lambda_a - *eta_star);
}

ConditionReport check_frequency_condition(const AttackSchedule& s, const AttackBudget& b, double t1, double t2,
                                          bool event_variant)
{
    check_window(t1, t2);
    b.validate();
    std::vector<double> starts;
    for (const auto& iv : s.intervals()) {
        if (iv.start >= t1 && iv.start < t2) {
            starts.push_back(iv.start);
        }
    }
    // Extremal windows open at one attack and close just after another.
    double worst = 0.0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        for (std::size_t j = i; j < starts.size(); ++j) {
            const double excess = static_cast<double>(j - i + 1) - b.n0;
            if (excess <= 0.0) {
                continue;
            }
            const double len = starts[j] - starts[i];
            worst = len > 0.0 ? std::max(worst, excess / len) : kInf;
        }
    }
    ConditionReport r;
    r.threshold = b.frequency_threshold(event_variant);
    r.tightest = worst > 0.0 ? 1.0 / worst : kInf;
    r.pass = r.tightest > r.threshold;
    return r;
}

ConditionReport check_duration_condition(const AttackSchedule& s, const AttackBudget& b, double t1, double t2,
                                         bool event_variant)
{
    check_window(t1, t2);
    b.validate();
    const auto ivs = inflated(s.intervals(), event_variant ? b.kappa_star : 0.0);

    std::vector<double> opens{t1};
    std::vector<double> closes{t2};
    for (const auto& iv : ivs) {
        if (iv.start > t1 && iv.start < t2) {
            opens.push_back(iv.start);
        }
        if (iv.end() > t1 && iv.end() < t2) {
            closes.push_back(iv.end());
        }
    }
    double worst = 0.0;
    for (double o : opens) {
        for (double c : closes) {
            if (!(c > o)) {
                continue;
            }
            worst = std::max(worst, (measure(ivs, o, c) - b.t0) / (c - o));
        }
    }
    ConditionReport r;
    r.threshold = b.duration_threshold();
    r.tightest = worst > 0.0 ? 1.0 / worst : kInf;
    r.pass = r.tightest > r.threshold;
    return r;
}

}  // namespace resopt

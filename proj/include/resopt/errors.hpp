#pragma once

#include <stdexcept>
#include <string>

namespace resopt {

// Malformed or inconsistent input (dimensions, ranges, schema).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller broke an operation's precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Time or window argument outside the permitted range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Problem size beyond what an exhaustive routine handles.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A modelling hypothesis (common stationary distribution, positive cut) fails.
class AssumptionViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoSolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvexityViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace resopt

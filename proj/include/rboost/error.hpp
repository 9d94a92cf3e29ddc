#pragma once

#include <stdexcept>
#include <string>

namespace rboost {

/// Precondition violated by a caller-supplied value (dimensions, ranges, labels).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Shrinkage schedule produced a degree outside [0, 1).
class InvalidSchedule : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// The search direction is identically zero on the sample, so no step can make progress.
class DegenerateDirection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Risk kept decreasing along the direction through every bracket expansion.
class UnboundedDescent : public std::runtime_error {
public:
    UnboundedDescent(const std::string& what, double edge)
        : std::runtime_error(what), edge_(edge) {}

    /// Last bracket edge reached, signed in the descent direction.
    double edge() const noexcept { return edge_; }

private:
    double edge_;
};

/// exp(-y f) left the representable range for the exponential loss.
class LossOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Malformed model or data file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rboost

#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition or sizing violation in a caller-supplied argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A value left the effective domain of the monotone part of the potential.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Failure inside a time-stepping solve. `step` is the time step (0-based)
/// at which the failure happened, or -1 when not tied to a step.
class SolverError : public Error {
public:
    SolverError(const std::string& what, int step = -1)
        : Error(what), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace pfc

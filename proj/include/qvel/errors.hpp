#pragma once

#include <stdexcept>
#include <string>

namespace qvel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// An input violates an operation's precondition (non-finite, wrong length, negative history...).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

/// The parameter regime does not support the requested quantity (e.g. no imaginary crossing).
class UnsupportedRegime : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "unsupported-regime"; }
};

/// An arccos argument (or similar) left its domain by more than roundoff.
class NumericDomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric-domain"; }
};

/// A quantity proven nonzero/finite came out degenerate. Signals a bug or an unreachable regime.
class NumericDegeneracy : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric-degeneracy"; }
};

/// A sign proven by theory was violated.
class InternalContradiction : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "internal-contradiction"; }
};

/// Boundary case where the answer is not determined (e.g. delta*mu == 1).
class DegenerateRegime : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate-regime"; }
};

/// A property the algorithm relies on (proved in theory) does not hold numerically.
class InvariantViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invariant-violation"; }
};

class NotFound : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "not-found"; }
};

/// Operation called on an object in the wrong state (e.g. frequency of a non-converged measurement).
class StateError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "state"; }
};

/// The measurement window did not contain enough oscillation to decide; extend the horizon.
class Inconclusive : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "inconclusive"; }
};

class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(const std::string& what, double last_valid_time)
        : Error(what), last_valid_time_(last_valid_time) {}
    const char* kind() const noexcept override { return "integration-diverged"; }
    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// Bad CLI configuration.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

}  // namespace qvel

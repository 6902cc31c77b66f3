#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace discern {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A market or configuration failed validation. `field()` names the offending input.
class SpecError : public Error {
public:
    SpecError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// An argument lies outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The fixed point (or closed form) does not describe an interior equilibrium.
class NoInteriorEquilibrium : public Error {
public:
    NoInteriorEquilibrium(const std::string& what, std::vector<std::size_t> states = {})
        : Error(what), states_(std::move(states)) {}

    /// States at which interiority fails (empty when the failure is a primitive inequality).
    const std::vector<std::size_t>& states() const noexcept { return states_; }

private:
    std::vector<std::size_t> states_;
};

class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Belief extraction was requested for a DAG outside the supported class.
class UnsupportedDag : public Error {
public:
    using Error::Error;
};

/// Operation not available for the given variant or input class.
class Unsupported : public Error {
public:
    using Error::Error;
};

} // namespace discern

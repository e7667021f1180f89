#pragma once

#include <stdexcept>
#include <string>

namespace pmo {

/// Base of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid (non-finite, negative, out-of-range) arguments.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failures: integrator underflow, root-search non-convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Both branches of the neuron stay above the detection threshold, so the
/// phases shrink to zero length.
class CollapseError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Configuration parsing/validation failures (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pmo

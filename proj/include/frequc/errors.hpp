#pragma once

#include <stdexcept>
#include <string>

namespace frequc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration value (depth, grid, policy limit, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. The message names the file and line.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed but violates a model invariant. The message names the entity.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration or linear-algebra failure (non-finite state, singular system).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// MILP/LP backend failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace frequc

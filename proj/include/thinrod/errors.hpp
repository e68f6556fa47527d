#pragma once

#include <stdexcept>
#include <string>

namespace thinrod {

/// Point or coordinate outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid user configuration: resolution, thresholds, study parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or unsupported geometry.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Factorization breakdown or non-convergence of an eigensolver.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace thinrod

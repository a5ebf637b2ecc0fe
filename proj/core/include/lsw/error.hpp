#pragma once

#include <stdexcept>
#include <string>

namespace lsw {

/// Malformed or inconsistent configuration (file, keys, dimensions).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument shape or range violation at an API boundary.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter vector outside the admissible set (memory bounds, positivity,
/// ARMA stability) or outside the domain of a closed-form formula.
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Block plan arithmetic failure: T, N, S do not tile the series, or a grid
/// range contains no admissible plan.
class PlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A covariance or Fisher matrix failed a positive-definiteness check.
class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lsw

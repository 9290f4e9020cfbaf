#pragma once

#include <stdexcept>
#include <string>

namespace fracthird {

struct ParameterDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct RegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct HypothesisError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ShapeMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AccuracyError : std::runtime_error {
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved relative error " + std::to_string(achieved) + ")"),
          achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

struct InstabilityGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fracthird

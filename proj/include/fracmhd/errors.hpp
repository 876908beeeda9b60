#pragma once

#include <stdexcept>
#include <string>

namespace fracmhd {

// Argument outside the mathematical domain (e.g. order not in (-1,1)).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CalibrationError : std::runtime_error {
    double best_eps;
    CalibrationError(const std::string& msg, double best)
        : std::runtime_error(msg), best_eps(best) {}
};

// Failed factorization or solve.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver used out of sequence (missing history, double update).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Caller broke a documented precondition.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace fracmhd

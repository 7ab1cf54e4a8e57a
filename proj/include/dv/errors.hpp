#pragma once

#include <stdexcept>
#include <string>

namespace dv {

// Input outside an operation's domain (maps to exit status 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Adaptive quadrature stopped before reaching its tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what + " (value " + std::to_string(value) + ", error estimate " +
                             std::to_string(error_estimate) + ")"),
          value_(value), error_(error_estimate) {}
    double value() const { return value_; }
    double error_estimate() const { return error_; }

private:
    double value_;
    double error_;
};

// A numerical check did not meet its tolerance (maps to exit status 2).
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reading or writing an artifact failed (maps to exit status 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dv

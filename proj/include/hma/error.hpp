#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hma {

enum class ErrorKind {
    invalid_argument,  // malformed input, point outside a domain, grid mismatch
    hypothesis,        // a theorem precondition (positivity, contraction) fails
    validation,        // boundary data not weakly compatible
    convergence,       // iteration budget exhausted
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when successive approximation runs out of iterations. Carries the
/// sup-norm increment history so callers can report how far it got.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> increments)
        : Error(ErrorKind::convergence, what), increments_(std::move(increments)) {}
    const std::vector<double>& increments() const noexcept { return increments_; }

private:
    std::vector<double> increments_;
};

}  // namespace hma

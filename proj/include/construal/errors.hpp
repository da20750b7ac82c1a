#pragma once

#include <stdexcept>
#include <string>

namespace construal {

/// Raised when an input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by iterative solvers that exhaust their iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual, long iterations)
        : std::runtime_error(what + " (residual " + std::to_string(last_residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    long iterations_;
};

/// Grid text that cannot be parsed; line and column are 1-based (0 when not applicable).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + msg),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

} // namespace construal

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osc {

/// Input data violates a precondition (non-finite entries, empty vectors, ...).
class InvalidInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A combining rule is malformed or its ranks do not fit the ensemble size.
class InvalidRuleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric routine could not reach its accuracy target.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// A moment table does not cover the requested ensemble size or key.
class TableCoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input (CSV, cache file, bias file) failed to parse.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Network training diverged or could not complete.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace osc

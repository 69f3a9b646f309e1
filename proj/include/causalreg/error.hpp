#pragma once

#include <stdexcept>
#include <string>

namespace causalreg {

// Exception hierarchy. The CLI maps each family onto its own exit code.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad shapes, out-of-range parameters, non-finite entries.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Numerically degenerate problem (singular system, zero-variance column, ...).
class DegenerateProblem : public Error {
public:
    using Error::Error;
};

/// Debiasing denominator too close to zero.
class InstabilityError : public DegenerateProblem {
public:
    using DegenerateProblem::DegenerateProblem;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long row = -1, long col = -1)
        : Error(what), row_(row), col_(col) {}
    long row() const { return row_; }
    long col() const { return col_; }

private:
    long row_;
    long col_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace causalreg

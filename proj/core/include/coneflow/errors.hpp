#pragma once

#include <stdexcept>
#include <string>

namespace coneflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rejected input parameters (profile out of its admissible range, bad spec, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (r <= 0, level below range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An improper integral whose tail does not converge.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Requested tolerance could not be met within the subdivision budget.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// Two independent routes to the same quantity disagree beyond tolerance.
class ModelInconsistencyError : public Error {
public:
    using Error::Error;
};

/// ODE integration aborted; carries the last time that was still valid.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_valid_time)
        : Error(what), last_time(last_valid_time) {}
    double last_time;
};

/// Config file rejected; carries the offending line number (1-based, 0 = file level).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line_number)
        : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    int line;
};

} // namespace coneflow

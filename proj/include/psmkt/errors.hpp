#pragma once

#include <stdexcept>
#include <string>

namespace psmkt {

/// Parameter bounds violation. The message lists every offending field
/// as "section.field out of [lo, hi] (got v)".
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// An entry-flow grid does not cover the requested time range.
class FlowCoverageError : public std::runtime_error {
public:
    explicit FlowCoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Quadrature refinement failed to converge to the required tolerance.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operation called outside its market regime (growth vs consolidation).
class RegimeError : public std::domain_error {
public:
    explicit RegimeError(const std::string& msg) : std::domain_error(msg) {}
};

/// Malformed or unusable input data (config files, data tables).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Too few usable observations for an estimator.
class InsufficientDataError : public DataError {
public:
    explicit InsufficientDataError(const std::string& msg) : DataError(msg) {}
};

/// Statistical routine given a sample it cannot handle.
class SampleError : public std::runtime_error {
public:
    explicit SampleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure inside a market simulation (e.g. price search cannot bracket).
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace psmkt

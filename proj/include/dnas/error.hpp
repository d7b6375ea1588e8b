#pragma once

#include <stdexcept>
#include <string>

namespace dnas {

/// Base class for every error raised by the search engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid search configuration (bad rates, tournament larger than population, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A candidate that violates the search-space invariants was passed where a valid one is required.
class InvalidCandidateError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

/// Any failure while obtaining metrics for a candidate.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Raised when the supernet for a data configuration ended in the failed state.
class SupernetFailedError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

class BackendTimeoutError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// The external backend answered with something that does not follow the wire protocol.
class ProtocolError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

} // namespace dnas

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dac {

// Root of every error the engine raises. Callers that only care about
// "something went wrong in compression" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Shape mismatch: non-square matrix, mixed sequence lengths, misaligned lists.
class DimensionError : public Error {
public:
    using Error::Error;
};

class StochasticityError : public Error {
public:
    using Error::Error;
};

// Argument outside a function's mathematical domain (p <= 0 for a log, empty input).
class DomainError : public Error {
public:
    using Error::Error;
};

class UndefinedCorrelationError : public DomainError {
public:
    using DomainError::DomainError;
};

// Anything a scorer backend reports. The compressor converts these into an
// aborted run with the partial trace attached.
class ScorerError : public Error {
public:
    using Error::Error;
};

class ScriptedMissError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

class TransportError : public ScorerError {
public:
    TransportError(const std::string& what, int attempts)
        : ScorerError(what), attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

class ProtocolError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

class CapacityError : public ScorerError {
public:
    CapacityError(const std::string& what, std::size_t limit)
        : ScorerError(what), limit_(limit) {}

    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t limit_;
};

} // namespace dac

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vhs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class CoefficientError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("parse error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class SolveError : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class BlowupError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class EpsilonTooLarge : public Error {
public:
    using Error::Error;
};

class RegimeError : public Error {
public:
    using Error::Error;
};

class GapError : public Error {
public:
    using Error::Error;
};

class NonUniqueOrbit : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace vhs

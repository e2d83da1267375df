#pragma once

#include <stdexcept>
#include <string>

namespace rainsr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File or stream read/write failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Malformed on-disk data (bad magic, bad header fields).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Header dimensions inconsistent with the available payload.
class TruncationError : public FormatError {
public:
    explicit TruncationError(const std::string& msg) : FormatError(msg) {}
};

/// Values outside the legal domain (NaN, negative rain rate, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Operands with incompatible shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Invalid run configuration (empty split, bad rule, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Non-finite value reached a place that must stay finite (training loss, ...).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace rainsr

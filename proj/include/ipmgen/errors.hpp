#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipmgen {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model text. Carries a 1-based source position.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A model that is syntactically fine but violates a well-formedness rule
/// (duplicate names, unresolved references, out-of-domain constants, type clashes).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Invalid generator or analysis configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A search or construction budget was exhausted before an answer was known.
/// Never used to signal a negative answer.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// No exact method applies to the model; callers should fall back to sampling.
class MethodUnavailable : public Error {
public:
    using Error::Error;
};

}  // namespace ipmgen

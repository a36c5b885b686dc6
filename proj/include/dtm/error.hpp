#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed problem text or expression. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), bare_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& bare_message() const noexcept { return bare_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string bare_;
};

/// A well-formed problem that violates a structural rule or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Elementary function, division or evaluation outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two series with different truncation orders met in a binary operation.
class OrderMismatch : public Error {
public:
    using Error::Error;
};

} // namespace dtm

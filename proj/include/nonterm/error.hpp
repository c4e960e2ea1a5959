#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nonterm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a 1-based line/column.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Raised when the prover finds a SAT model the checker rejects. Never recovered from.
class SoundnessError : public Error {
public:
    using Error::Error;
};

} // namespace nonterm

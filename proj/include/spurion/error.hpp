#pragma once

#include <stdexcept>
#include <string>

namespace spurion {

enum class ErrorKind {
    Parse,
    Domain,
    Config,
    Capacity,
    Fingerprint,
    StrictMiss,
    NoSolution,
    Invalid,
};

class Error : public std::runtime_error {
    ErrorKind kind_;

public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
};

class ParseError : public Error {
    std::size_t line_;
    std::size_t column_;

public:
    ParseError(std::size_t line, std::size_t column, const std::string &message)
        : Error(ErrorKind::Parse,
                std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
};

// Process exit code for an error class (CLI contract).
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Config:
    case ErrorKind::Invalid:
        return 2;
    case ErrorKind::Capacity:
        return 3;
    case ErrorKind::Fingerprint:
        return 4;
    case ErrorKind::StrictMiss:
        return 5;
    case ErrorKind::Domain:
    case ErrorKind::NoSolution:
        return 6;
    }
    return 1;
}

} // namespace spurion

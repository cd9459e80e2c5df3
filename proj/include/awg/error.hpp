#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace awg {

/// Raised when an input violates a documented precondition or invariant.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed text input; carries the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace awg

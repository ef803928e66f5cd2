#pragma once

#include <stdexcept>
#include <string>

namespace retroscope {

// Raised when a computation is well-posed as a call but has no valid answer:
// an outcome with zero probability, a parameter point whose derived weights
// leave [0, 1], a state outside the support of the ensemble, and so on.
// Precondition violations (bad dimensions, out-of-range angles) use
// std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Circuit text that does not follow the grammar. Carries a 1-based position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          message_(message) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

}  // namespace retroscope

#pragma once

#include <stdexcept>
#include <string>

namespace sll {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown (singular factorization, failed Cholesky, ...).
/// `pivot` names the failing pivot when one is known, -1 otherwise.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long pivot = -1)
        : std::runtime_error(what), pivot_(pivot) {}
    [[nodiscard]] long pivot() const noexcept { return pivot_; }

private:
    long pivot_;
};

/// Malformed input files or configuration.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SLL_REQUIRE(cond, msg)                                     \
    do {                                                           \
        if (!(cond)) throw ::sll::InvalidArgument(msg);            \
    } while (false)

} // namespace sll

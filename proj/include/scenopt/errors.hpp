#pragma once

#include <stdexcept>
#include <string>

namespace scenopt {

// Argument outside the mathematical domain of a function (eps not in (0,1), k > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller violated a documented precondition that is not a pure domain issue.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Program or stage description is incomplete or inconsistent (e.g. missing sampler).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Combinatorial guard exceeded.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Solver failed to converge or hit a numerically singular basis.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SCENOPT_REQUIRE(cond, ErrorType, msg)        \
    do {                                             \
        if (!(cond)) throw ::scenopt::ErrorType(msg); \
    } while (0)

}  // namespace scenopt

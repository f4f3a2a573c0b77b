#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmicro {

/// Two adjacent levels coincide (or are out of order) within the gap tolerance.
class DegenerateSpectrumError : public std::invalid_argument {
public:
    DegenerateSpectrumError(const std::string& what, std::size_t first, std::size_t second)
        : std::invalid_argument(what), first_(first), second_(second) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

/// Evaluation requested where the quantity is undefined (e.g. ln of a vanishing density).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative or stochastic procedure failed to produce a usable answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qmicro

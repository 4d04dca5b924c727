#pragma once

#include <stdexcept>
#include <string>

namespace fracmv {

// Violated precondition: bad parameter, shape mismatch, unsupported range.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that was well-posed but failed numerically
// (blow-up, factorization failure, optimizer breakdown).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

}  // namespace fracmv

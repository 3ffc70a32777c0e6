#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

// Argument outside the documented range of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Quadrature, root finding or iteration ran out of budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Zone inequalities tie at floating point resolution.
class AmbiguousRegime : public std::runtime_error {
 public:
  explicit AmbiguousRegime(const std::string& what) : std::runtime_error(what) {}
};

class GridMismatch : public std::invalid_argument {
 public:
  explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical check that the caller asked to enforce did not hold.
class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fraclap

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace precip {

// Invalid arguments: parameters outside a distribution's support, empty
// inputs, violated representation constraints.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Quadrature, root finding or optimization did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OptimizerError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace precip

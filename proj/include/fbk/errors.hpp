#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fbk {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative procedure (root finding, quadrature) did not reach its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectral basis holds fewer eigenpairs than a summation needs.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::size_t required)
      : std::runtime_error(what), required_(required) {}

  /// Suggested capacity for a retry.
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// The series route was asked for a time below its supported minimum.
class TimeBelowMinimumError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace fbk

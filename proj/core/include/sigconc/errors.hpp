#pragma once

#include <stdexcept>
#include <string>

namespace sigconc {

/// Bad input: out-of-range letters, mismatched shapes, invalid parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Floating-point breakdown: non-finite results, failed factorizations.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a tensor cannot be expressed in the Lyndon basis within
/// tolerance, which means the input was not group-like upstream.
class NotLieElement : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Rejection sampling exhausted its attempt cap.
class SamplingError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace sigconc

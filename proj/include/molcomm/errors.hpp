#pragma once

#include <stdexcept>
#include <string>

namespace molcomm {

// Domain errors (non-finite time, k < 1, negative counts) use std::domain_error.

/// Caller broke a documented precondition (size mismatch, duplicate labels).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Problem instance exceeds a configured size cap (permanent order, ISI taps,
/// enumeration horizon).
class SizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Numerical procedure failed (quadrature non-convergence, count cap exceeded).
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace molcomm

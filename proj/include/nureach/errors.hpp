#pragma once

#include <stdexcept>
#include <string>

namespace nureach {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation (non-square, length mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A result left the representable range (matrix exponential overflow).
class NumericRangeError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed (eigenvalue iteration did not converge).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Bad scalar argument or malformed value (non-finite entry, order out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The realization is not minimal, so the joint criterion does not apply.
class MinimalityError : public Error {
 public:
  using Error::Error;
};

/// The schedule has fewer instants than the operation needs.
class InsufficientScheduleError : public Error {
 public:
  using Error::Error;
};

/// Operation only defined for a different system order.
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// Forbidden instants requested for a system without an oscillatory pair.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// Schedule search constraints cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace nureach

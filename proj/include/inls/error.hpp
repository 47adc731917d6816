#pragma once

#include <stdexcept>
#include <string>

namespace inls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented invariant or parameter constraint does not hold.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf found in a field or integrand.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Phivare ratio does not vanish at r -> R+; the k constraint is violated.
class UnboundedRatioError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace inls

#pragma once

#include <stdexcept>
#include <string>

namespace cdops {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, mismatched groups, violated preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An element lies beyond the configured word-metric radius.
class OutOfRadiusError : public Error {
 public:
  using Error::Error;
};

/// Ball enumeration exceeded the configured element budget.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// An operation would need support outside the radius budget; raised
/// instead of truncating silently.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Neumann inversion requested for an element with CD norm >= 1.
class NotContractiveError : public Error {
 public:
  using Error::Error;
};

/// LU pivot breakdown while inverting a dense section.
class SingularSectionError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure (non-convergence, empty certified set).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdops

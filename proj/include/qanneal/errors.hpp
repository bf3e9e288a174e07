#pragma once

#include <stdexcept>

namespace qanneal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad lengths, invalid bounds, bad indices).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A dense amplitude vector or exhaustive enumeration would exceed the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Post-selection onto a subspace with zero weight.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// The repeat-until-success loop hit its configured cutoff.
class RepetitionLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace qanneal

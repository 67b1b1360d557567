#pragma once

#include <stdexcept>
#include <string>

namespace ncclab {

/// Domain error: bad input, violated precondition, guard overflow. The CLI
/// maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class GuardExceeded : public Error {
 public:
  using Error::Error;
};

class FieldMismatch : public Error {
 public:
  using Error::Error;
};

/// Internal defect: an identity that must hold by construction did not.
/// The CLI maps these to exit status 2.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ncclab

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gpack {

// Base class for everything thrown on purpose. The CLI maps subclasses to
// exit codes, so new error types should pick one of the families below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed scenario, inconsistent policy, argument misuse.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Structural errors raised by configuration surgery.
class SlotCollisionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownTemplateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidTemplateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MalformedTraceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Capacity / state-space family.
class InfeasibleLoadError : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLargeError : public Error {
 public:
  StateSpaceTooLargeError(const std::string& what, std::uint64_t partial_count)
      : Error(what), partial_count(partial_count) {}
  std::uint64_t partial_count = 0;
};

// Numerical family.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ReducibleChainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SupportMismatchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gpack

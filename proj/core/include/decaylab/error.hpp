#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configuration file or serialized container is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A resource budget (matrix dimension, memory) would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace decaylab

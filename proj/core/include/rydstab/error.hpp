#pragma once

#include <stdexcept>
#include <string>

namespace rydstab {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad index, negative duration, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A computation could not meet its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rydstab

#pragma once

#include <stdexcept>
#include <string>

namespace spinthermo {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad spectrum, unknown JSON key, edge off the topology.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Problem too large for exact enumeration.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Non-finite value or failed cross-check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinthermo

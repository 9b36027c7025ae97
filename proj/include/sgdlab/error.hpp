#pragma once

#include <stdexcept>
#include <string>

namespace sgdlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input values (non-finite coordinates, out-of-range indices, degenerate metrics).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the regime a pipeline is defined for.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical run produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A search exhausted its grid without a hit.
class NotFound : public Error {
 public:
  using Error::Error;
};

/// The requested mode cannot be computed exactly at this size.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A sampled instance violates its family's structural contract.
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

}  // namespace sgdlab

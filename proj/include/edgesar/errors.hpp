#pragma once

#include <stdexcept>
#include <string>

namespace edgesar {

/// Base of every error raised by the library. The CLI maps each subclass to
/// its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate platform geometry (zero range, far-field violation).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix dimensions that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range scalar parameter (p < 1, negative stride, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Scene descriptor or experiment configuration rejected.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read/written, or its content is malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or failed factorizations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgesar

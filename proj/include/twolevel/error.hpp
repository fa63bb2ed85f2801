#pragma once

#include <stdexcept>
#include <string>

namespace twolevel {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size or degree parameter is outside its admissible range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or inconsistent mesh geometry.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Two spaces cannot be related by the requested operation.
class IncompatibleSpaces : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown that indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Invalid algorithm or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace twolevel

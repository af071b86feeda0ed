#pragma once

#include <stdexcept>
#include <string>

namespace linkgcn {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent embedding / label / checkpoint files.
class LoadError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or violated operation preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Parameter / feature dimensions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace linkgcn

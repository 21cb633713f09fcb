#pragma once

#include <stdexcept>
#include <string>

namespace aad {

// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes or text (bad magic, truncated payload, parse failure).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Dimension or size mismatch between containers that must agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Operation applied to state that cannot support it yet
// (no history, insufficient samples, empty accumulator).
class StateError : public Error {
 public:
  using Error::Error;
};

// Runtime observation that violates a value precondition (NaN/Inf sample).
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem level failure (missing path, unreadable file).
class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aad

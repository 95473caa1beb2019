#pragma once

#include <stdexcept>
#include <string>

namespace lsm {

/// Invalid parameters, malformed files or violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Filesystem failures (missing files, unwritable directories).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the readout solver when the normal equations cannot be factored.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsm

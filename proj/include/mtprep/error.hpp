#pragma once

#include <stdexcept>
#include <string>

namespace mtprep {

// Filesystem and subprocess failures. CLI maps these to exit code 1.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (bad UTF-8, field-count mismatches, unparsable
// numbers). CLI maps these to exit code 1 as well.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or violated preconditions use std::invalid_argument;
// the CLI maps those to exit code 2.

}  // namespace mtprep

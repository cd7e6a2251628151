#pragma once

#include <stdexcept>
#include <string>

namespace audioml {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a stable exit code: UsageError -> 2, ParseError/IoError -> 3,
// ValueError -> 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input content: bad WAV/CSV/JSON/split-file bytes.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Filesystem problems: missing input, unwritable output.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Violated numeric precondition or domain error.
class ValueError : public Error {
 public:
  explicit ValueError(const std::string& what) : Error(what) {}
};

// Inconsistent command-line flags.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace audioml

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vstain {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes. Carries the offset at which parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Sizes, shapes or channel counts that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented invariant (range, finiteness, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Invalid or infeasible configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Scene or dataset generation cannot satisfy its geometry constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf during numeric work.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Empty or otherwise unusable dataset.
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Undefined statistic (e.g. correlation of a constant series).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// Two file sets that should correspond by name do not.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace vstain

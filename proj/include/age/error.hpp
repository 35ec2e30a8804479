#pragma once

#include <stdexcept>
#include <string>

namespace age {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message carries the file and line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a dataset contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value where finite arithmetic is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// API called outside its preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace age

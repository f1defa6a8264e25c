#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetbandits {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Raised for user-facing configuration problems; the CLI maps it to exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The CLI maps this to exit 3.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : IoError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingItem : public IoError {
 public:
  explicit MissingItem(const std::string& item_id)
      : IoError("interaction references unknown item '" + item_id + "'"),
        item_id_(item_id) {}

  const std::string& item_id() const { return item_id_; }

 private:
  std::string item_id_;
};

}  // namespace hetbandits

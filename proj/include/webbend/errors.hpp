#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webbend {

// Base of every error the toolkit raises for bad input or misuse.
// InternalError is the only subclass that signals a bug rather than bad data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileError : public Error {
 public:
  explicit FileError(const std::string& path, const std::string& what = "cannot open file")
      : Error(what + ": " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Malformed input; row is 1-based counting the header as row 1, 0 when not row-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t row, const std::string& message)
      : Error(format(source, row, message)), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  static std::string format(const std::string& source, std::size_t row, const std::string& message) {
    std::string out = source;
    if (row > 0) out += ":" + std::to_string(row);
    return out + ": " + message;
  }
  std::size_t row_;
};

class InvalidDomain : public Error {
 public:
  using Error::Error;
};

class DuplicateDomain : public Error {
 public:
  using Error::Error;
};

class DuplicateTarget : public Error {
 public:
  using Error::Error;
};

class UnknownTarget : public Error {
 public:
  using Error::Error;
};

class MissingSnapshot : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class TooFewPoints : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace webbend

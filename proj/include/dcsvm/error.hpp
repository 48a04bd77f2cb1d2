#pragma once

#include <stdexcept>
#include <string>

namespace dcsvm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line) :
        Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_{ line } {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

class CardinalityError : public Error {
  public:
    using Error::Error;
};

class SplitError : public Error {
  public:
    using Error::Error;
};

class NumericError : public Error {
  public:
    using Error::Error;
};

/// Invalid user-supplied configuration (bad flag values, unknown names).
class ValidationError : public Error {
  public:
    using Error::Error;
};

class FileError : public Error {
  public:
    using Error::Error;
};

class ModelFormatError : public Error {
  public:
    using Error::Error;
};

class VersionError : public ModelFormatError {
  public:
    using ModelFormatError::ModelFormatError;
};

class ChecksumError : public ModelFormatError {
  public:
    using ModelFormatError::ModelFormatError;
};

}  // namespace dcsvm

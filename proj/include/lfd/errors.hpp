#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace lfd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A quaternion left the domain on which exp/log are mutually inverse.
/// Rollouts attach the integration step at which it happened.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
      : Error(step ? what + " (step " + std::to_string(*step) + ")" : what), step_(step) {}

  std::optional<std::size_t> step() const { return step_; }

 private:
  std::optional<std::size_t> step_;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class NonMonotonicTime : public Error {
 public:
  using Error::Error;
};

class NonUniformStamps : public Error {
 public:
  using Error::Error;
};

class DegenerateScene : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when the problem is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lfd

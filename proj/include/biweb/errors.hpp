#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biweb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A geometric or analytic precondition failed at the queried point.
///
/// `condition()` is a short machine-readable label ("degenerate",
/// "separation violated", "tangency", "inflection", "singular division",
/// "branch error", ...); `what()` carries the full message.
class DomainError : public Error {
 public:
  DomainError(std::string condition, const std::string& message)
      : Error(condition + ": " + message), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Iterative numerics (quadrature, bracketing) failed to reach tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& message, double achieved)
      : Error(message), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Malformed input: bad model file, schema violations, bad flags.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : InputError("syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace biweb

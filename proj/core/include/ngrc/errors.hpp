#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ngrc {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad index, too little data, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside of its numerically valid domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data cannot support the requested computation (zero scale, zero target, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or configuration text.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An integrated trajectory left the finite range.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace ngrc

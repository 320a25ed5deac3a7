#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented domain of an operation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure exhausted its budget before meeting its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The integral is mathematically divergent (a verdict, not a numeric failure).
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

/// A search over a finite grid found no admissible point.
class NotFound : public Error {
 public:
  using Error::Error;
};

/// A Gram matrix is too ill-conditioned to factor reliably.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

}  // namespace bergman

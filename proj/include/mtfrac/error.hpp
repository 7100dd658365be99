#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mtfrac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or configuration violates a documented invariant.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic would exceed its capacity.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The power series ran out of shells before its tail bound met the tolerance.
class SeriesNotConverged : public ConvergenceError {
 public:
  SeriesNotConverged(const std::string& what, std::complex<double> partial_sum, int shells)
      : ConvergenceError(what), partial_sum_(partial_sum), shells_(shells) {}

  std::complex<double> partial_sum() const noexcept { return partial_sum_; }
  int shells() const noexcept { return shells_; }

 private:
  std::complex<double> partial_sum_;
  int shells_;
};

}  // namespace mtfrac

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Pivot magnitude fell below the working-precision threshold.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<std::complex<double>> partial)
      : Error(what), partial_(std::move(partial)) {}

  // Eigenvalues deflated before the iteration cap was hit.
  const std::vector<std::complex<double>>& partial() const noexcept { return partial_; }

 private:
  std::vector<std::complex<double>> partial_;
};

class NumericOverflow : public Error {
 public:
  using Error::Error;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

}  // namespace stabcert

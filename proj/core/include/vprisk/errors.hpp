#pragma once

#include <stdexcept>
#include <string>

namespace vprisk {

// Bad shapes, out-of-range parameters, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. Carries the 1-based location of the offending cell
// (0 when the problem is not tied to a single cell).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row, long column)
      : std::runtime_error(what), row_(row), column_(column) {}

  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

 private:
  long row_;
  long column_;
};

// An iterative method stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

// A modelling assumption required by the requested computation does not hold
// (e.g. ridgeless evaluation at p == n).
class AssumptionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace vprisk

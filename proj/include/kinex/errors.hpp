#pragma once

#include <stdexcept>
#include <string>

namespace kinex {

// Bad parameters supplied by the caller (ladder sizes, rates, gamma, mu, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A coefficient object came out of construction violating one of its
// invariants: negative transition density, non-positive welfare weight, ...
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inputs for which a quantity is undefined (zero income, zero weight mass,
// constant regression abscissa).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An integration step left the simplex; the caller should reduce dt.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reading a config file or writing results failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace kinex

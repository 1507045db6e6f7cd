#pragma once

#include <stdexcept>
#include <string>

namespace minsing {

/// Malformed or inconsistent user input (dimension mismatch, bad key, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Arguments outside the mathematical domain of a formula (Gamma poles).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Quadrature did not reach the requested tolerance within its panel budget.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double estimate, double error, int panels)
      : std::runtime_error(what), estimate(estimate), error(error), panels(panels) {}
  double estimate;
  double error;
  int panels;
};

struct UnsupportedDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace minsing

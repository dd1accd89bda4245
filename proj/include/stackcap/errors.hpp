#pragma once

#include <stdexcept>
#include <string>

namespace stackcap {

/// Invalid or inconsistent user-supplied parameters.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Argument outside the representable range of the evaluated formula
/// (e.g. an exponential overflowing double precision).
class RangeError : public std::range_error {
 public:
  explicit RangeError(const std::string& msg) : std::range_error(msg) {}
};

/// A numerical method failed to converge or produced a non-finite result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A time step was rejected: positivity lost or the step size collapsed.
class StabilityError : public NumericError {
 public:
  explicit StabilityError(const std::string& msg) : NumericError(msg) {}
};

/// Curve fitting failed: degenerate window, no signal, or noise floor reached.
class FitError : public NumericError {
 public:
  explicit FitError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace stackcap

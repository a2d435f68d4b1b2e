#pragma once

#include <stdexcept>
#include <string>

namespace bipcorr {

/// Malformed arguments: bad sizes, out-of-range vertices, placements that do
/// not fit a shape.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A size guard refused the request (enumeration cap, recursion state budget,
/// Monte Carlo trial budget). The message says which path to use instead.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tracked floating-point error exceeded the caller's tolerance.
class PrecisionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bipcorr

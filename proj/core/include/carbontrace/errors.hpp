#pragma once

#include <stdexcept>
#include <string>

namespace carbontrace {

/// Malformed input file or unparseable value. Maps to CLI exit code 1.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network invariant violations detected by validate(). Maps to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model cannot represent the situation (unreachable consuming bus,
/// infeasible dispatch, stale partition). Maps to exit code 2.
class ModelingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular system, balance violation beyond tolerance.
/// Maps to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace carbontrace

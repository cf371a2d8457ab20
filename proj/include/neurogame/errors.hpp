#pragma once

#include <stdexcept>
#include <string>

namespace neurogame {

// Malformed or inconsistent caller input (dimension mismatch, bad index,
// schema violation). Maps to exit status 2 in the CLI.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is well-formed but mathematically degenerate, e.g. normalizing a
// zero score vector.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

// An exact enumeration was asked to go beyond its configured size limit.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation produced a non-finite intermediate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace neurogame

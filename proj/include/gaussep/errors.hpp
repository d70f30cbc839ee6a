#pragma once

#include <stdexcept>
#include <string>

namespace gaussep {

/// Malformed or physically invalid input: bad shapes, asymmetry, non-finite
/// entries, a matrix that is not a correlation matrix.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced something it should not have (non-finite iterate,
/// failed certificate step). Carries the iteration index when one applies.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int step = -1)
      : std::runtime_error(what), step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace gaussep

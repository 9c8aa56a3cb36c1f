#pragma once

#include <stdexcept>
#include <string>

namespace mehler {

// Caller supplied bad values: wrong dimensions, wrong signs, non-finite entries.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A closed-form quantity was requested for a model that has none
// (e.g. the characteristic exponent of a Pareto-tailed jump law).
struct UnsupportedAnalytic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A statistical routine was called with too few samples.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mehler

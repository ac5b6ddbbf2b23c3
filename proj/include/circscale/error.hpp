//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace circscale {

// Invalid shapes, mismatched structure or bad user configuration.
class ConfigError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// The spectral diagonal of a Hessian approximation is not safely positive.
class DegenerateScalingError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An invariant that should hold by construction was violated.
class InternalConsistencyError: public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// The compact quasi-Newton representation became unusable.
class OperatorStateError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace circscale

// Copyright 2026 The relq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELQ_ERRORS_H
#define RELQ_ERRORS_H

#include <stdexcept>

namespace relq {

/// Invalid argument to a library function (out-of-range index, dimension mismatch, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A quantum resource was used in a state that does not allow it (e.g. a consumed Bell pair).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A qudit handle was consumed twice or used after consumption.
struct LinearityError : StateError {
    using StateError::StateError;
};

/// A message was scheduled outside the light cone of its emission event.
struct CausalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A channel path leaves the sender's secure region.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A verification step cannot be scheduled at the event it requires.
struct SchedulingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedStrategyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace relq

#endif

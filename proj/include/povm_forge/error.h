// Copyright 2026 The povm-forge Authors
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

#ifndef POVM_FORGE_ERROR_H
#define POVM_FORGE_ERROR_H

#include <stdexcept>
#include <string>

namespace povm_forge {

/// Raised when an argument lies outside the mathematical domain of an operation
/// (negative probabilities, mismatched dimensions, out-of-range parameters...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation declines to run because its result would be
/// unreliable or too expensive (truncation too small, enumeration too large).
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or parsed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace povm_forge

#endif  // POVM_FORGE_ERROR_H

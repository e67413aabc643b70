// Copyright 2026 The polysim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace polysim {

/// Malformed or out-of-range input: bad sizes, unknown labels, parse failures.
class InputError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its domain (e.g. beta on anticommuting
/// indices, a forced measurement outcome with probability zero).
class PreconditionError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// A mathematical check failed: an LP was infeasible where feasibility was
/// required, a preservation property was violated, an invariant broke.
class VerificationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace polysim

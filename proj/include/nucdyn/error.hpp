// Copyright 2026 The nucdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace nucdyn {

// Exception categories map one-to-one onto the CLI exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed config, wrong dimensions, out-of-range parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed (non-convergence, loss of unitarity).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A guarded precondition refused the request, e.g. mapping a
/// Hamiltonian whose reflection symmetry is broken without `force`.
class PreconditionError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace nucdyn

// Copyright 2026 The qcoh Authors
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

namespace qcoh {

/// Failure categories. The C API maps these one-to-one onto status codes.
enum class ErrorKind {
    Shape,              // incompatible dimensions
    Domain,             // input outside the mathematical domain (non-hermitian, non-unitary, invalid state)
    Model,              // ill-formed model (Kraus completeness, negative rates)
    Integration,        // state left the valid set during time integration
    Configuration,      // simulation settings that cannot produce a meaningful run
    Truncation,         // Fock-space truncation too small
    Numerical,          // quadrature or solver did not converge
    UndefinedTimescale, // timescale formula has no finite value
    Validation,         // scenario configuration failed validation
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by integrate_master when a sampled state is no longer a density matrix.
class IntegrationError : public Error {
public:
    IntegrationError(double time, const std::string& what)
        : Error(ErrorKind::Integration, what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qcoh

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

#include "qcoh/hilbert.hpp"

#include <string>
#include <vector>

namespace qcoh {

/// Orthonormal measurement basis; column i is |chi_i>.
class BasisSpec {
public:
    BasisSpec(std::string label, ComplexMatrix vectors);

    static BasisSpec computational(Index dim);

    const std::string& label() const noexcept { return label_; }
    const ComplexMatrix& vectors() const noexcept { return vectors_; }
    Index dim() const noexcept { return vectors_.rows(); }

private:
    std::string label_;
    ComplexMatrix vectors_;
};

struct MixtureComponent {
    double weight;
    QuantumState state;  // must be pure
};

struct MixtureSpec {
    std::vector<MixtureComponent> components;
};

/// tr rho^2.
double purity(const QuantumState& rho);

struct PopulationsCoherences {
    RealVector populations;     // <chi_i|rho|chi_i>
    ComplexMatrix coherences;   // <chi_i|rho|chi_j>, diagonal set to zero
};

PopulationsCoherences populations_coherences(const QuantumState& rho, const BasisSpec& basis);

/// rho -> u rho u^dagger. Domain error unless u is unitary within 1e-10.
QuantumState basis_change(const QuantumState& rho, const ComplexMatrix& u);

/// <phi|rho|phi>; unclamped.
double measurement_probability(const QuantumState& rho, const QuantumState& phi);

/// sum_k f_k |Psi_k><Psi_k|.
QuantumState mix(const MixtureSpec& spec);

}  // namespace qcoh

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

#include "qcoh/coherence.hpp"

#include "qcoh/errors.hpp"

#include <cmath>

namespace qcoh {

BasisSpec::BasisSpec(std::string label, ComplexMatrix vectors)
    : label_(std::move(label)), vectors_(std::move(vectors)) {
    if (vectors_.rows() < 1 || vectors_.rows() != vectors_.cols())
        fail(ErrorKind::Shape, "basis '" + label_ + "' must have as many columns as the dimension");
    if (!is_unitary(vectors_, 1e-10)) fail(ErrorKind::Domain, "basis '" + label_ + "' is not orthonormal");
}

BasisSpec BasisSpec::computational(Index dim) { return BasisSpec("computational", ops::identity(dim)); }

double purity(const QuantumState& rho) {
    if (rho.is_pure()) {
        const double n = rho.amplitudes().squaredNorm();
        return n * n;
    }
    // tr(rho^2) = sum_ij |rho_ij|^2 for hermitian rho.
    return rho.density().squaredNorm();
}

PopulationsCoherences populations_coherences(const QuantumState& rho, const BasisSpec& basis) {
    if (basis.dim() != rho.dim()) fail(ErrorKind::Shape, "populations_coherences: basis and state dimensions differ");
    const ComplexMatrix& v = basis.vectors();
    ComplexMatrix transformed = v.adjoint() * rho.density() * v;
    PopulationsCoherences out{transformed.diagonal().real(), std::move(transformed)};
    out.coherences.diagonal().setZero();
    return out;
}

QuantumState basis_change(const QuantumState& rho, const ComplexMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim())
        fail(ErrorKind::Shape, "basis_change: unitary and state dimensions differ");
    if (!is_unitary(u, 1e-10)) fail(ErrorKind::Domain, "basis_change: operator is not unitary");
    if (rho.is_pure()) return QuantumState::pure(u * rho.amplitudes());
    return QuantumState::mixed(u * rho.density() * u.adjoint());
}

double measurement_probability(const QuantumState& rho, const QuantumState& phi) {
    if (!phi.is_pure()) fail(ErrorKind::Domain, "measurement_probability: projector state must be pure");
    if (phi.dim() != rho.dim()) fail(ErrorKind::Shape, "measurement_probability: dimensions differ");
    const ComplexVector& f = phi.amplitudes();
    if (rho.is_pure()) return std::norm(f.dot(rho.amplitudes()));
    return f.dot(rho.density() * f).real();
}

QuantumState mix(const MixtureSpec& spec) {
    if (spec.components.empty()) fail(ErrorKind::Domain, "mix: mixture has no components");
    const Index n = spec.components.front().state.dim();
    double total = 0.0;
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (const auto& c : spec.components) {
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) fail(ErrorKind::Domain, "mix: weights must be finite and >= 0");
        if (!c.state.is_pure()) fail(ErrorKind::Domain, "mix: components must be pure states");
        if (c.state.dim() != n) fail(ErrorKind::Shape, "mix: components have different dimensions");
        const ComplexVector& psi = c.state.amplitudes();
        rho.noalias() += c.weight * (psi * psi.adjoint());
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::Domain, "mix: weights do not sum to 1");
    return QuantumState::mixed(std::move(rho));
}

}  // namespace qcoh

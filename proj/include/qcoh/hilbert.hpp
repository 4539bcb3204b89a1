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

// Dense complex linear algebra on finite Hilbert spaces.
//
// Operators and density matrices are plain Eigen::MatrixXcd values. Kets are
// Eigen::VectorXcd. Units: hbar = 1, so Hamiltonians carry energy = 1/time.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qcoh {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Acceptance thresholds for density-matrix validity.
struct StateTolerance {
    double hermitian = 1e-10;
    double trace = 1e-10;
    double min_eigenvalue = -1e-8;
};

/// A pure (normalized ket) or mixed (density matrix) state. Immutable.
class QuantumState {
public:
    enum class Kind { Pure, Mixed };

    /// Throws Domain if the vector is not normalized within `norm_tol`.
    static QuantumState pure(ComplexVector amplitudes, double norm_tol = 1e-10);
    /// Throws Domain if rho is not hermitian, unit-trace and positive within `tol`.
    static QuantumState mixed(ComplexMatrix rho, const StateTolerance& tol = {});

    static QuantumState basis(Index dim, Index i);
    static QuantumState maximally_mixed(Index dim);

    Kind kind() const noexcept { return kind_; }
    bool is_pure() const noexcept { return kind_ == Kind::Pure; }
    Index dim() const noexcept;

    /// Amplitudes of a pure state; throws Domain for mixed states.
    const ComplexVector& amplitudes() const;
    /// Density matrix; |psi><psi| for pure states.
    ComplexMatrix density() const;

private:
    QuantumState(Kind kind, ComplexVector psi, ComplexMatrix rho)
        : kind_(kind), psi_(std::move(psi)), rho_(std::move(rho)) {}

    Kind kind_;
    ComplexVector psi_;
    ComplexMatrix rho_;
};

/// Ordered subsystem dimensions of a tensor-product space.
class TensorFactorization {
public:
    explicit TensorFactorization(std::vector<Index> factor_dims);

    const std::vector<Index>& factor_dims() const noexcept { return dims_; }
    Index total_dim() const noexcept { return total_; }

private:
    std::vector<Index> dims_;
    Index total_ = 1;
};

/// Shape error on a.cols() != b.rows().
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& a);
/// Kronecker product; the left factor is the slow index.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced operator on the factors listed in `keep` (output ordered by factor index).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const TensorFactorization& fact,
                            std::span<const std::size_t> keep);

struct HermitianEigen {
    RealVector values;     // ascending
    ComplexMatrix vectors; // orthonormal columns
};

HermitianEigen eig_hermitian(const ComplexMatrix& a);

/// exp(-i h t) through the spectral decomposition of h.
ComplexMatrix expm_hermitian_prop(const ComplexMatrix& h, double t);

/// u rho u^+; O(n^2) when u is diagonal.
ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& rho);

double max_abs(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10);
bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);
bool all_finite(const ComplexMatrix& a);

/// Half the trace norm of (a - b).
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

namespace ops {

ComplexMatrix identity(Index n);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
/// S_z = diag(+1/2, -1/2).
ComplexMatrix spin_z();
ComplexMatrix spin_x();
/// |i><j| in dimension n.
ComplexMatrix transition(Index n, Index i, Index j);
/// Truncated annihilation operator on n Fock states.
ComplexMatrix annihilation(Index n);

}  // namespace ops

}  // namespace qcoh

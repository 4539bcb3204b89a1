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

#include "qcoh/hilbert.hpp"

#include "qcoh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qcoh {

namespace {

std::string shape_of(const ComplexMatrix& a) {
    std::ostringstream os;
    os << a.rows() << "x" << a.cols();
    return os.str();
}

bool is_diagonal(const ComplexMatrix& a) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (i != j && a(i, j) != Complex{}) return false;
    return true;
}

}  // namespace

QuantumState QuantumState::pure(ComplexVector amplitudes, double norm_tol) {
    if (amplitudes.size() < 1) fail(ErrorKind::Shape, "pure state needs dimension >= 1");
    if (!amplitudes.allFinite()) fail(ErrorKind::Domain, "pure state has non-finite amplitudes");
    const double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > norm_tol) {
        std::ostringstream os;
        os << "pure state not normalized: sum |c_i|^2 = " << norm2;
        fail(ErrorKind::Domain, os.str());
    }
    return QuantumState(Kind::Pure, std::move(amplitudes), ComplexMatrix{});
}

QuantumState QuantumState::mixed(ComplexMatrix rho, const StateTolerance& tol) {
    if (rho.rows() < 1 || rho.rows() != rho.cols())
        fail(ErrorKind::Shape, "density matrix must be square, got " + shape_of(rho));
    if (!all_finite(rho)) fail(ErrorKind::Domain, "density matrix has non-finite entries");
    if (!is_hermitian(rho, tol.hermitian)) fail(ErrorKind::Domain, "density matrix is not hermitian");
    const Complex tr = rho.trace();
    if (std::abs(tr - Complex{1.0, 0.0}) > tol.trace) {
        std::ostringstream os;
        os << "density matrix trace " << tr.real() << " differs from 1";
        fail(ErrorKind::Domain, os.str());
    }
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    const double lowest = solver.eigenvalues()(0);
    if (lowest < tol.min_eigenvalue) {
        std::ostringstream os;
        os << "density matrix not positive: smallest eigenvalue " << lowest;
        fail(ErrorKind::Domain, os.str());
    }
    return QuantumState(Kind::Mixed, ComplexVector{}, std::move(rho));
}

QuantumState QuantumState::basis(Index dim, Index i) {
    if (dim < 1 || i < 0 || i >= dim) fail(ErrorKind::Shape, "basis index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(i) = 1.0;
    return pure(std::move(v));
}

QuantumState QuantumState::maximally_mixed(Index dim) {
    if (dim < 1) fail(ErrorKind::Shape, "dimension must be >= 1");
    return mixed(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

Index QuantumState::dim() const noexcept { return is_pure() ? psi_.size() : rho_.rows(); }

const ComplexVector& QuantumState::amplitudes() const {
    if (!is_pure()) fail(ErrorKind::Domain, "mixed state has no amplitude vector");
    return psi_;
}

ComplexMatrix QuantumState::density() const {
    if (is_pure()) return psi_ * psi_.adjoint();
    return rho_;
}

TensorFactorization::TensorFactorization(std::vector<Index> factor_dims) : dims_(std::move(factor_dims)) {
    if (dims_.empty()) fail(ErrorKind::Shape, "factorization needs at least one factor");
    for (Index d : dims_) {
        if (d < 1) fail(ErrorKind::Shape, "factor dimensions must be >= 1");
        total_ *= d;
    }
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        fail(ErrorKind::Shape, "matmul: " + shape_of(a) + " times " + shape_of(b));
    return a * b;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const TensorFactorization& fact,
                            std::span<const std::size_t> keep) {
    const auto& dims = fact.factor_dims();
    if (rho.rows() != rho.cols() || rho.rows() != fact.total_dim())
        fail(ErrorKind::Shape, "partial_trace: operator " + shape_of(rho) + " inconsistent with factorization");
    if (keep.empty()) fail(ErrorKind::Shape, "partial_trace: keep set is empty");

    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) fail(ErrorKind::Shape, "partial_trace: factor index out of range");
        kept[k] = true;
    }

    // Row-major strides: the first factor is the slowest index.
    std::vector<Index> stride(dims.size(), 1);
    for (std::size_t f = dims.size(); f-- > 1;) stride[f - 1] = stride[f] * dims[f];

    // Offsets of every multi-index restricted to one group of factors.
    auto offsets = [&](bool want_kept) {
        std::vector<Index> out{0};
        for (std::size_t f = 0; f < dims.size(); ++f) {
            if (kept[f] != want_kept) continue;
            std::vector<Index> next;
            next.reserve(out.size() * static_cast<std::size_t>(dims[f]));
            for (Index base : out)
                for (Index d = 0; d < dims[f]; ++d) next.push_back(base + d * stride[f]);
            out = std::move(next);
        }
        return out;
    };
    const std::vector<Index> keep_off = offsets(true);
    const std::vector<Index> trace_off = offsets(false);

    const auto n = static_cast<Index>(keep_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            Complex acc{};
            for (Index t : trace_off) acc += rho(keep_off[a] + t, keep_off[b] + t);
            out(a, b) = acc;
        }
    return out;
}

HermitianEigen eig_hermitian(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) fail(ErrorKind::Shape, "eig_hermitian: matrix is " + shape_of(a));
    if (!is_hermitian(a)) fail(ErrorKind::Domain, "eig_hermitian: matrix is not hermitian");
    if (is_diagonal(a)) {
        const Index n = a.rows();
        std::vector<Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index x, Index y) { return a(x, x).real() < a(y, y).real(); });
        HermitianEigen out{RealVector(n), ComplexMatrix::Zero(n, n)};
        for (Index k = 0; k < n; ++k) {
            out.values(k) = a(order[k], order[k]).real();
            out.vectors(order[k], k) = 1.0;
        }
        return out;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()));
    if (solver.info() != Eigen::Success) fail(ErrorKind::Numerical, "eig_hermitian: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_hermitian_prop(const ComplexMatrix& h, double t) {
    if (h.rows() != h.cols()) fail(ErrorKind::Shape, "expm_hermitian_prop: matrix is " + shape_of(h));
    if (!is_hermitian(h)) fail(ErrorKind::Domain, "expm_hermitian_prop: hamiltonian is not hermitian");
    const Index n = h.rows();
    if (is_diagonal(h)) {
        ComplexMatrix u = ComplexMatrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) u(i, i) = std::exp(-kI * h(i, i).real() * t);
        return u;
    }
    const HermitianEigen eig = eig_hermitian(h);
    ComplexVector phases(n);
    for (Index i = 0; i < n; ++i) phases(i) = std::exp(-kI * eig.values(i) * t);
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& rho) {
    if (u.cols() != rho.rows() || rho.rows() != rho.cols() || u.rows() != u.cols())
        fail(ErrorKind::Shape, "conjugate_by: " + shape_of(u) + " acting on " + shape_of(rho));
    if (is_diagonal(u)) {
        const ComplexVector d = u.diagonal();
        return d.asDiagonal() * rho * d.conjugate().asDiagonal();
    }
    return u * rho * u.adjoint();
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, max_abs(a));
    return max_abs(a - a.adjoint()) <= tol * scale;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::Shape, "trace_distance: " + shape_of(a) + " vs " + shape_of(b));
    const ComplexMatrix d = a - b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace ops {

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix hadamard() { return (pauli_x() + pauli_z()) / std::sqrt(2.0); }

ComplexMatrix spin_z() { return 0.5 * pauli_z(); }

ComplexMatrix spin_x() { return 0.5 * pauli_x(); }

ComplexMatrix transition(Index n, Index i, Index j) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

ComplexMatrix annihilation(Index n) {
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

}  // namespace ops

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Model: return "model";
        case ErrorKind::Integration: return "integration";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::Truncation: return "truncation";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::UndefinedTimescale: return "undefined-timescale";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace qcoh

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

#include "qcoh/evolution.hpp"

#include "qcoh/errors.hpp"

#include <cmath>
#include <sstream>

namespace qcoh {

void KrausSet::check_complete(double tol) const {
    if (operators.empty()) fail(ErrorKind::Model, "Kraus set is empty");
    const Index n = operators.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& e : operators) {
        if (e.rows() != n || e.cols() != n) fail(ErrorKind::Shape, "Kraus operators must all be N x N");
        sum.noalias() += e.adjoint() * e;
    }
    const double defect = max_abs(sum - ComplexMatrix::Identity(n, n));
    if (defect > tol) {
        std::ostringstream os;
        os << "Kraus completeness violated: max |sum E^+E - I| = " << defect;
        fail(ErrorKind::Model, os.str());
    }
}

KrausSet KrausSet::amplitude_damping(double p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Model, "amplitude damping probability must lie in [0, 1]");
    // Basis order (g, e).
    ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - p);
    ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
    e1(0, 1) = std::sqrt(p);
    return KrausSet{{e0, e1}, std::nullopt};
}

KrausSet KrausSet::dephasing(double q) {
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::Model, "dephasing probability must lie in [0, 1]");
    return KrausSet{{std::sqrt(1.0 - q) * ops::identity(2), std::sqrt(q) * ops::pauli_z()}, std::nullopt};
}

LindbladModel::LindbladModel(ComplexMatrix hamiltonian, std::vector<Channel> channels)
    : h_(std::move(hamiltonian)), channels_(std::move(channels)) {
    if (h_.rows() < 1 || h_.rows() != h_.cols()) fail(ErrorKind::Shape, "hamiltonian must be square");
    if (!all_finite(h_)) fail(ErrorKind::Model, "hamiltonian has non-finite entries");
    if (!is_hermitian(h_)) fail(ErrorKind::Model, "hamiltonian is not hermitian");
    for (std::size_t j = 0; j < channels_.size(); ++j) {
        const auto& c = channels_[j];
        if (c.op.rows() != h_.rows() || c.op.cols() != h_.cols())
            fail(ErrorKind::Shape, "jump operator " + std::to_string(j) + " has wrong dimension");
        if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
            fail(ErrorKind::Model, "jump rate " + std::to_string(j) + " must be finite and >= 0");
        if (!all_finite(c.op)) fail(ErrorKind::Model, "jump operator " + std::to_string(j) + " has non-finite entries");
    }
}

ComplexMatrix LindbladModel::effective_hamiltonian() const {
    ComplexMatrix heff = h_;
    for (const auto& c : channels_) heff.noalias() -= (0.5 * kI * c.rate) * (c.op.adjoint() * c.op);
    return heff;
}

void TimeGrid::validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
        fail(ErrorKind::Configuration, "time grid requires t_end > t_start");
    if (n_steps < 1) fail(ErrorKind::Configuration, "time grid requires n_steps >= 1");
    if (sample_every < 1) fail(ErrorKind::Configuration, "time grid requires sample_every >= 1");
}

double TimeGrid::time_at(std::size_t step) const noexcept {
    if (step == n_steps) return t_end;
    return t_start + static_cast<double>(step) * dt();
}

std::vector<std::size_t> TimeGrid::sample_steps() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s <= n_steps; s += sample_every) out.push_back(s);
    if (out.back() != n_steps) out.push_back(n_steps);
    return out;
}

std::vector<double> TimeGrid::sample_times() const {
    std::vector<double> out;
    for (std::size_t s : sample_steps()) out.push_back(time_at(s));
    return out;
}

QuantumState evolve_unitary(const QuantumState& rho, const ComplexMatrix& h, double t) {
    if (h.rows() != rho.dim() || h.cols() != rho.dim())
        fail(ErrorKind::Shape, "evolve_unitary: hamiltonian and state dimensions differ");
    const ComplexMatrix u = expm_hermitian_prop(h, t);
    if (rho.is_pure()) return QuantumState::pure(u * rho.amplitudes());
    return QuantumState::mixed(conjugate_by(u, rho.density()));
}

QuantumState apply_kraus(const QuantumState& rho, const KrausSet& ks) {
    ks.check_complete();
    if (ks.operators.front().rows() != rho.dim()) fail(ErrorKind::Shape, "apply_kraus: dimensions differ");
    const ComplexMatrix r = rho.density();
    ComplexMatrix out = ComplexMatrix::Zero(r.rows(), r.cols());
    for (const auto& e : ks.operators) out.noalias() += e * r * e.adjoint();
    return QuantumState::mixed(std::move(out));
}

namespace {

// Precomputed generator pieces. The dissipator is
// D(rho) = A + A^+ + sym(sum_j K_j rho K_j^+), A = -1/2 G rho, G = sum_j K_j^+ K_j,
// with K_j = sqrt(gamma_j) L_j; the full right-hand side adds -i[H, rho].
class Generator {
public:
    explicit Generator(const LindbladModel& model) : h_(model.hamiltonian()) {
        g_ = ComplexMatrix::Zero(h_.rows(), h_.cols());
        for (const auto& c : model.channels()) {
            if (c.rate <= 0.0) continue;
            jumps_.push_back(std::sqrt(c.rate) * c.op);
            g_.noalias() += jumps_.back().adjoint() * jumps_.back();
        }
    }

    bool dissipative() const noexcept { return !jumps_.empty(); }
    const ComplexMatrix& hamiltonian() const noexcept { return h_; }

    void dissipate(const ComplexMatrix& rho, ComplexMatrix& out) const {
        if (jumps_.empty()) {
            out.setZero(rho.rows(), rho.cols());
            return;
        }
        tmp_.noalias() = -0.5 * (g_ * rho);
        out = tmp_ + tmp_.adjoint();
        jump_sum_.setZero(rho.rows(), rho.cols());
        for (const auto& k : jumps_) {
            tmp_.noalias() = k * rho;
            jump_sum_.noalias() += tmp_ * k.adjoint();
        }
        out += 0.5 * (jump_sum_ + jump_sum_.adjoint());
    }

    void apply(const ComplexMatrix& rho, ComplexMatrix& out) const {
        dissipate(rho, out);
        tmp_.noalias() = (-kI) * (h_ * rho);
        out += tmp_ + tmp_.adjoint();
    }

private:
    ComplexMatrix h_;
    ComplexMatrix g_;
    std::vector<ComplexMatrix> jumps_;
    mutable ComplexMatrix tmp_;
    mutable ComplexMatrix jump_sum_;
};

// Interaction-picture RK4: the coherent part is propagated exactly with
// exp(-i H dt/2) and RK4 is applied to the dissipator only.
class Rk4ip {
public:
    Rk4ip(const LindbladModel& model, double dt)
        : gen_(model),
          dt_(dt),
          half_(expm_hermitian_prop(gen_.hamiltonian(), 0.5 * dt)),
          full_(expm_hermitian_prop(gen_.hamiltonian(), dt)) {}

    void step(ComplexMatrix& rho) {
        if (!gen_.dissipative()) {
            rho = conjugate_by(full_, rho);
            return;
        }
        const ComplexMatrix rho_i = conjugate_by(half_, rho);
        gen_.dissipate(rho, k1_);
        k1_ = conjugate_by(half_, k1_);
        gen_.dissipate(rho_i + (0.5 * dt_) * k1_, k2_);
        gen_.dissipate(rho_i + (0.5 * dt_) * k2_, k3_);
        gen_.dissipate(conjugate_by(half_, rho_i + dt_ * k3_), k4_);
        rho = conjugate_by(half_, rho_i + (dt_ / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_)) + (dt_ / 6.0) * k4_;
    }

private:
    Generator gen_;
    double dt_;
    ComplexMatrix half_, full_;
    ComplexMatrix k1_, k2_, k3_, k4_;
};

template <class OnSample>
void run_integrator(const ComplexMatrix& rho0, const LindbladModel& model, const TimeGrid& grid, OnSample&& on_sample) {
    grid.validate();
    if (rho0.rows() != model.dim() || rho0.cols() != model.dim())
        fail(ErrorKind::Shape, "integrate_master: state and model dimensions differ");
    Rk4ip rk(model, grid.dt());
    ComplexMatrix rho = rho0;
    std::size_t step = 0;
    for (std::size_t target : grid.sample_steps()) {
        while (step < target) {
            rk.step(rho);
            ++step;
        }
        on_sample(grid.time_at(step), rho);
    }
}

}  // namespace

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const LindbladModel& model) {
    if (rho.rows() != model.dim() || rho.cols() != model.dim())
        fail(ErrorKind::Shape, "lindblad_rhs: state and model dimensions differ");
    ComplexMatrix out;
    Generator(model).apply(rho, out);
    return out;
}

ComplexMatrix lindblad_rhs(const QuantumState& rho, const LindbladModel& model) {
    return lindblad_rhs(rho.density(), model);
}

StateSeries integrate_master(const QuantumState& rho0, const LindbladModel& model, const TimeGrid& grid) {
    StateSeries out;
    const StateTolerance tol{1e-10, 1e-8, -1e-8};
    run_integrator(rho0.density(), model, grid, [&](double t, const ComplexMatrix& rho) {
        try {
            out.states.push_back(QuantumState::mixed(rho, tol));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "integration left the state space at t = " << t << ": " << e.what();
            throw IntegrationError(t, os.str());
        }
        out.times.push_back(t);
    });
    return out;
}

std::vector<ComplexMatrix> integrate_master_raw(const ComplexMatrix& rho0, const LindbladModel& model,
                                                const TimeGrid& grid) {
    std::vector<ComplexMatrix> out;
    run_integrator(rho0, model, grid, [&](double, const ComplexMatrix& rho) { out.push_back(rho); });
    return out;
}

}  // namespace qcoh

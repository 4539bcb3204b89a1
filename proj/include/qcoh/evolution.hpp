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

// Deterministic density-matrix evolution: unitary propagation, Kraus maps and
// fixed-step integration of the Lindblad master equation
//
//   d rho/dt = -i[H, rho] + sum_j gamma_j (L_j rho L_j^+ - 1/2 {L_j^+ L_j, rho}).

#include "qcoh/hilbert.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qcoh {

struct KrausSet {
    std::vector<ComplexMatrix> operators;
    std::optional<double> time_label;

    /// Model error unless sum_k E_k^+ E_k = I within `tol`.
    void check_complete(double tol = 1e-8) const;

    static KrausSet amplitude_damping(double p);
    static KrausSet dephasing(double q);
};

struct Channel {
    ComplexMatrix op;
    double rate;
};

class LindbladModel {
public:
    LindbladModel(ComplexMatrix hamiltonian, std::vector<Channel> channels = {});

    const ComplexMatrix& hamiltonian() const noexcept { return h_; }
    const std::vector<Channel>& channels() const noexcept { return channels_; }
    Index dim() const noexcept { return h_.rows(); }

    /// H - (i/2) sum_j gamma_j L_j^+ L_j.
    ComplexMatrix effective_hamiltonian() const;

private:
    ComplexMatrix h_;
    std::vector<Channel> channels_;
};

/// Uniform grid of n_steps steps; states are reported every sample_every steps.
/// Sample steps are 0, s, 2s, ... and the final step is always included.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t n_steps = 1;
    std::size_t sample_every = 1;

    void validate() const;
    double dt() const noexcept { return (t_end - t_start) / static_cast<double>(n_steps); }
    double time_at(std::size_t step) const noexcept;
    std::vector<std::size_t> sample_steps() const;
    std::vector<double> sample_times() const;
};

struct StateSeries {
    std::vector<double> times;
    std::vector<QuantumState> states;
};

QuantumState evolve_unitary(const QuantumState& rho, const ComplexMatrix& h, double t);

QuantumState apply_kraus(const QuantumState& rho, const KrausSet& ks);

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const LindbladModel& model);
ComplexMatrix lindblad_rhs(const QuantumState& rho, const LindbladModel& model);

/// Fixed step grid.dt(). The Hamiltonian part is propagated exactly with
/// exp(-i H dt/2) and the dissipator by RK4 in that interaction picture, so
/// the scheme is fourth order and exact when every rate is zero. Validity (trace within 1e-8, hermitian,
/// smallest eigenvalue >= -1e-8) is checked at sample points only; a violation
/// throws IntegrationError carrying the sample time.
StateSeries integrate_master(const QuantumState& rho0, const LindbladModel& model, const TimeGrid& grid);

/// Raw integrated trajectory of the density matrix at the sample steps, no validity checks.
std::vector<ComplexMatrix> integrate_master_raw(const ComplexMatrix& rho0, const LindbladModel& model,
                                                const TimeGrid& grid);

}  // namespace qcoh

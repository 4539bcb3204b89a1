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

// Monte Carlo wave-function (quantum-jump) unraveling of a LindbladModel.
//
// Stepping, for every step n of the grid (dt = grid.dt()):
//
//   phi  = P psi,  P = exp(-i H_eff dt)      (no-jump propagator)
//   dp   = 1 - |phi|^2                       (norm decay = jump probability)
//   u    = draw                              (one draw per step)
//   if u < dp:                               jump
//       v = draw                             (one extra draw per jump)
//       channel j = first index with cumsum(w) > v * sum(w), w_j = gamma_j |L_j psi|^2
//       psi = L_j psi / |L_j psi|
//       jump time = t_n + dt * u / dp
//   else:
//       psi = phi / |phi|
//
// Draws come from CounterRng(seed, trajectory index) in exactly this order.
// A step with dp > max_jump_probability is a configuration error.

#include "qcoh/evolution.hpp"
#include "qcoh/hilbert.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcoh {

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    Index dim = 0;
    TimeGrid grid;
    std::vector<double> jump_times;
    std::vector<std::size_t> jump_channels;
    std::vector<double> snapshot_times;
    std::vector<ComplexVector> snapshots;  // empty when snapshots were not recorded
};

struct TrajectoryOptions {
    bool record_snapshots = true;
    double max_jump_probability = 0.1;
};

/// Precomputed per-(model, dt) stepping data; shareable across threads.
class JumpKernel {
public:
    JumpKernel(const LindbladModel& model, double dt);

    const ComplexMatrix& no_jump_propagator() const noexcept { return propagator_; }
    Index dim() const noexcept { return propagator_.rows(); }

    /// sqrt(gamma_j) L_j for every channel (zero-rate channels included as zero).
    const std::vector<ComplexMatrix>& scaled_jumps() const noexcept { return jumps_; }

private:
    ComplexMatrix propagator_;
    std::vector<ComplexMatrix> jumps_;
};

TrajectoryRecord run_trajectory(const QuantumState& psi0, const LindbladModel& model, const TimeGrid& grid,
                                std::uint64_t seed, std::uint64_t index = 0, const TrajectoryOptions& opts = {});

TrajectoryRecord run_trajectory(const QuantumState& psi0, const JumpKernel& kernel, const TimeGrid& grid,
                                std::uint64_t seed, std::uint64_t index = 0, const TrajectoryOptions& opts = {});

/// Trajectories 0..n_traj-1 of one seed, in index order.
std::vector<TrajectoryRecord> run_ensemble(const QuantumState& psi0, const LindbladModel& model,
                                           const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                                           const TrajectoryOptions& opts = {}, std::size_t workers = 0);

struct EnsembleEstimate {
    std::size_t n_traj = 0;
    std::vector<double> times;
    std::vector<QuantumState> mean_state;
    std::vector<RealVector> population_stderr;  // computational-basis populations
};

/// Streaming reduction of snapshot projectors. Adding records in a fixed
/// order makes the result independent of how they were produced.
class EnsembleAccumulator {
public:
    void add(const TrajectoryRecord& rec);
    std::size_t count() const noexcept { return n_; }
    EnsembleEstimate estimate() const;

private:
    std::size_t n_ = 0;
    Index dim_ = 0;
    std::vector<double> times_;
    std::vector<ComplexMatrix> sum_;
    std::vector<RealVector> pop_mean_;
    std::vector<RealVector> pop_m2_;
};

/// Shape error if records disagree on dimension or sample times, or lack snapshots.
EnsembleEstimate aggregate(std::span<const TrajectoryRecord> trajs);

/// Runs n_traj trajectories without retaining them and returns the ensemble
/// estimate after each count in `checkpoints` (ascending, last == n_traj).
std::vector<EnsembleEstimate> run_ensemble_estimates(const QuantumState& psi0, const LindbladModel& model,
                                                     const TimeGrid& grid, std::uint64_t seed,
                                                     std::span<const std::size_t> checkpoints,
                                                     std::size_t workers = 0);

struct UnravelingReport {
    std::size_t n_traj = 0;
    std::vector<double> times;
    std::vector<double> trace_distance;
    std::vector<bool> flagged;   // trace_distance > flag_threshold
    double flag_threshold = 0.0; // 5 / sqrt(n_traj)
    double max_trace_distance = 0.0;
    EnsembleEstimate trajectories;
    StateSeries master;
};

UnravelingReport unraveling_equivalence_report(const LindbladModel& model, const QuantumState& psi0,
                                               const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                                               std::size_t workers = 0);

// Text form, one item per line, numbers printed with 17 significant digits:
//
//   qcoh-trajectory 1
//   seed <seed>
//   index <trajectory index>
//   dim <dim>
//   grid <t_start> <t_end> <n_steps> <sample_every>
//   jumps <r>
//   <time> <channel>                                  (r lines, ascending time)
//   snapshots <s>
//   <t> <re_0> <im_0> ... <re_{dim-1}> <im_{dim-1}>   (s lines)
//   end
std::string serialize_trajectory(const TrajectoryRecord& rec);
TrajectoryRecord parse_trajectory(std::string_view text);

}  // namespace qcoh

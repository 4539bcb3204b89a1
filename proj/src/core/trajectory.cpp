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

#include "qcoh/trajectory.hpp"

#include "qcoh/errors.hpp"
#include "qcoh/format.hpp"
#include "qcoh/parallel.hpp"
#include "qcoh/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcoh {

JumpKernel::JumpKernel(const LindbladModel& model, double dt) {
    if (!(dt > 0.0)) fail(ErrorKind::Configuration, "trajectory step must be positive");
    const ComplexMatrix generator = (-kI * dt) * model.effective_hamiltonian();
    propagator_ = generator.exp();
    for (const auto& c : model.channels()) jumps_.push_back(std::sqrt(c.rate) * c.op);
}

TrajectoryRecord run_trajectory(const QuantumState& psi0, const LindbladModel& model, const TimeGrid& grid,
                                std::uint64_t seed, std::uint64_t index, const TrajectoryOptions& opts) {
    grid.validate();
    return run_trajectory(psi0, JumpKernel(model, grid.dt()), grid, seed, index, opts);
}

TrajectoryRecord run_trajectory(const QuantumState& psi0, const JumpKernel& kernel, const TimeGrid& grid,
                                std::uint64_t seed, std::uint64_t index, const TrajectoryOptions& opts) {
    grid.validate();
    if (!psi0.is_pure()) fail(ErrorKind::Domain, "run_trajectory: initial state must be pure");
    if (psi0.dim() != kernel.dim()) fail(ErrorKind::Shape, "run_trajectory: state and model dimensions differ");

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.index = index;
    rec.dim = kernel.dim();
    rec.grid = grid;

    CounterRng rng(seed, index);
    const double dt = grid.dt();
    const ComplexMatrix& prop = kernel.no_jump_propagator();
    const auto& jumps = kernel.scaled_jumps();

    ComplexVector psi = psi0.amplitudes();
    ComplexVector phi(psi.size());
    ComplexVector tmp(psi.size());
    std::vector<double> weights(jumps.size());

    const std::vector<std::size_t> samples = grid.sample_steps();
    std::size_t next_sample = 0;
    auto maybe_sample = [&](std::size_t step) {
        if (next_sample < samples.size() && samples[next_sample] == step) {
            rec.snapshot_times.push_back(grid.time_at(step));
            if (opts.record_snapshots) rec.snapshots.push_back(psi);
            ++next_sample;
        }
    };

    maybe_sample(0);
    for (std::size_t step = 0; step < grid.n_steps; ++step) {
        phi.noalias() = prop * psi;
        const double dp = 1.0 - phi.squaredNorm();
        if (dp > opts.max_jump_probability) {
            std::ostringstream os;
            os << "time step too coarse: jump probability " << dp << " exceeds " << opts.max_jump_probability
               << " at t = " << grid.time_at(step);
            fail(ErrorKind::Configuration, os.str());
        }
        const double u = rng.uniform();
        bool jumped = false;
        if (u < dp) {
            double total = 0.0;
            for (std::size_t j = 0; j < jumps.size(); ++j) {
                tmp.noalias() = jumps[j] * psi;
                weights[j] = tmp.squaredNorm();
                total += weights[j];
            }
            if (total > 0.0) {
                const double v = rng.uniform() * total;
                std::size_t channel = jumps.size();
                double cum = 0.0;
                for (std::size_t j = 0; j < jumps.size(); ++j) {
                    cum += weights[j];
                    if (weights[j] > 0.0 && cum > v) {
                        channel = j;
                        break;
                    }
                }
                // Rounding can leave v at the very top of the cumulative sum.
                if (channel == jumps.size())
                    for (std::size_t j = 0; j < jumps.size(); ++j)
                        if (weights[j] > 0.0) channel = j;
                tmp.noalias() = jumps[channel] * psi;
                psi = tmp / tmp.norm();
                rec.jump_times.push_back(grid.time_at(step) + dt * (u / dp));
                rec.jump_channels.push_back(channel);
                jumped = true;
            }
        }
        if (!jumped) psi = phi / phi.norm();
        maybe_sample(step + 1);
    }
    return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const QuantumState& psi0, const LindbladModel& model,
                                           const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                                           const TrajectoryOptions& opts, std::size_t workers) {
    grid.validate();
    const JumpKernel kernel(model, grid.dt());
    std::vector<TrajectoryRecord> out(n_traj);
    parallel_for(n_traj, resolve_workers(workers),
                 [&](std::size_t i) { out[i] = run_trajectory(psi0, kernel, grid, seed, i, opts); });
    return out;
}

void EnsembleAccumulator::add(const TrajectoryRecord& rec) {
    if (rec.snapshots.empty() || rec.snapshots.size() != rec.snapshot_times.size())
        fail(ErrorKind::Shape, "aggregate: trajectory has no recorded snapshots");
    if (n_ == 0) {
        dim_ = rec.dim;
        times_ = rec.snapshot_times;
        sum_.assign(times_.size(), ComplexMatrix::Zero(dim_, dim_));
        pop_mean_.assign(times_.size(), RealVector::Zero(dim_));
        pop_m2_.assign(times_.size(), RealVector::Zero(dim_));
    } else if (rec.dim != dim_ || rec.snapshot_times != times_) {
        fail(ErrorKind::Shape, "aggregate: trajectories do not share one grid and dimension");
    }
    ++n_;
    const double n = static_cast<double>(n_);
    for (std::size_t k = 0; k < times_.size(); ++k) {
        const ComplexVector& psi = rec.snapshots[k];
        sum_[k].noalias() += psi * psi.adjoint();
        // Welford update; identical inputs leave m2 exactly zero.
        for (Index i = 0; i < dim_; ++i) {
            const double p = std::norm(psi(i));
            const double delta = p - pop_mean_[k](i);
            pop_mean_[k](i) += delta / n;
            pop_m2_[k](i) += delta * (p - pop_mean_[k](i));
        }
    }
}

EnsembleEstimate EnsembleAccumulator::estimate() const {
    if (n_ == 0) fail(ErrorKind::Shape, "aggregate: no trajectories");
    EnsembleEstimate out;
    out.n_traj = n_;
    out.times = times_;
    const double n = static_cast<double>(n_);
    const StateTolerance tol{1e-10, 1e-8, -1e-8};
    for (std::size_t k = 0; k < times_.size(); ++k) {
        out.mean_state.push_back(QuantumState::mixed(sum_[k] / n, tol));
        RealVector se = RealVector::Zero(dim_);
        if (n_ > 1) se = (pop_m2_[k].cwiseMax(0.0) / (n * (n - 1.0))).cwiseSqrt();
        out.population_stderr.push_back(std::move(se));
    }
    return out;
}

EnsembleEstimate aggregate(std::span<const TrajectoryRecord> trajs) {
    EnsembleAccumulator acc;
    for (const auto& t : trajs) acc.add(t);
    return acc.estimate();
}

std::vector<EnsembleEstimate> run_ensemble_estimates(const QuantumState& psi0, const LindbladModel& model,
                                                     const TimeGrid& grid, std::uint64_t seed,
                                                     std::span<const std::size_t> checkpoints,
                                                     std::size_t workers) {
    grid.validate();
    if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < 1)
        fail(ErrorKind::Configuration, "ensemble checkpoints must be ascending and >= 1");
    const JumpKernel kernel(model, grid.dt());
    const std::size_t n_traj = checkpoints.back();
    const std::size_t nworkers = resolve_workers(workers);
    const std::size_t chunk = std::max<std::size_t>(64, 16 * nworkers);

    EnsembleAccumulator acc;
    std::vector<EnsembleEstimate> out;
    std::size_t next_checkpoint = 0;
    std::vector<TrajectoryRecord> batch;
    for (std::size_t first = 0; first < n_traj;) {
        // Never let a batch straddle a checkpoint.
        const std::size_t last = std::min({first + chunk, n_traj, checkpoints[next_checkpoint]});
        batch.assign(last - first, TrajectoryRecord{});
        parallel_for(last - first, nworkers,
                     [&](std::size_t i) { batch[i] = run_trajectory(psi0, kernel, grid, seed, first + i); });
        for (const auto& rec : batch) acc.add(rec);
        first = last;
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == acc.count()) {
            out.push_back(acc.estimate());
            ++next_checkpoint;
        }
    }
    return out;
}

UnravelingReport unraveling_equivalence_report(const LindbladModel& model, const QuantumState& psi0,
                                               const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                                               std::size_t workers) {
    if (n_traj < 1) fail(ErrorKind::Configuration, "unraveling check requires n_traj >= 1");
    UnravelingReport rep;
    rep.n_traj = n_traj;
    const std::size_t cp[] = {n_traj};
    rep.trajectories = std::move(run_ensemble_estimates(psi0, model, grid, seed, cp, workers).front());
    rep.master = integrate_master(psi0, model, grid);
    rep.times = rep.master.times;
    rep.flag_threshold = 5.0 / std::sqrt(static_cast<double>(n_traj));
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        const double d =
            trace_distance(rep.trajectories.mean_state[k].density(), rep.master.states[k].density());
        rep.trace_distance.push_back(d);
        rep.flagged.push_back(d > rep.flag_threshold);
        rep.max_trace_distance = std::max(rep.max_trace_distance, d);
    }
    return rep;
}

std::string serialize_trajectory(const TrajectoryRecord& rec) {
    std::ostringstream os;
    os << "qcoh-trajectory 1\n";
    os << "seed " << rec.seed << "\n";
    os << "index " << rec.index << "\n";
    os << "dim " << rec.dim << "\n";
    os << "grid " << fmt17(rec.grid.t_start) << ' ' << fmt17(rec.grid.t_end) << ' ' << rec.grid.n_steps << ' '
       << rec.grid.sample_every << "\n";
    os << "jumps " << rec.jump_times.size() << "\n";
    for (std::size_t k = 0; k < rec.jump_times.size(); ++k)
        os << fmt17(rec.jump_times[k]) << ' ' << rec.jump_channels[k] << "\n";
    os << "snapshots " << rec.snapshots.size() << "\n";
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        os << fmt17(rec.snapshot_times[k]);
        for (Index i = 0; i < rec.snapshots[k].size(); ++i)
            os << ' ' << fmt17(rec.snapshots[k](i).real()) << ' ' << fmt17(rec.snapshots[k](i).imag());
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

namespace {

class LineReader {
public:
    explicit LineReader(std::string_view text) : is_(std::string(text)) {}

    std::istringstream next(const char* expected_key) {
        std::string line;
        if (!std::getline(is_, line)) fail(ErrorKind::Io, std::string("trajectory text truncated before '") + expected_key + "'");
        ++line_no_;
        std::istringstream ls(line);
        if (expected_key[0] != '\0') {
            std::string key;
            ls >> key;
            if (key != expected_key) bad(std::string("expected '") + expected_key + "'");
        }
        return ls;
    }

    [[noreturn]] void bad(const std::string& what) const {
        fail(ErrorKind::Io, "trajectory text line " + std::to_string(line_no_) + ": " + what);
    }

    template <class T>
    T read(std::istringstream& ls) const {
        T v{};
        if (!(ls >> v)) bad("malformed number");
        return v;
    }

    void finish(std::istringstream& ls) const {
        std::string rest;
        if (ls >> rest) bad("unexpected trailing field '" + rest + "'");
    }

private:
    std::istringstream is_;
    std::size_t line_no_ = 0;
};

}  // namespace

TrajectoryRecord parse_trajectory(std::string_view text) {
    LineReader in(text);
    TrajectoryRecord rec;
    {
        auto ls = in.next("qcoh-trajectory");
        if (in.read<int>(ls) != 1) in.bad("unsupported format version");
        in.finish(ls);
    }
    {
        auto ls = in.next("seed");
        rec.seed = in.read<std::uint64_t>(ls);
        in.finish(ls);
    }
    {
        auto ls = in.next("index");
        rec.index = in.read<std::uint64_t>(ls);
        in.finish(ls);
    }
    {
        auto ls = in.next("dim");
        rec.dim = in.read<Index>(ls);
        if (rec.dim < 1) in.bad("dimension must be >= 1");
        in.finish(ls);
    }
    {
        auto ls = in.next("grid");
        rec.grid.t_start = in.read<double>(ls);
        rec.grid.t_end = in.read<double>(ls);
        rec.grid.n_steps = in.read<std::size_t>(ls);
        rec.grid.sample_every = in.read<std::size_t>(ls);
        in.finish(ls);
        rec.grid.validate();
    }
    std::size_t r = 0;
    {
        auto ls = in.next("jumps");
        r = in.read<std::size_t>(ls);
        in.finish(ls);
    }
    for (std::size_t k = 0; k < r; ++k) {
        auto ls = in.next("");
        const double t = in.read<double>(ls);
        const auto c = in.read<std::size_t>(ls);
        in.finish(ls);
        if (!rec.jump_times.empty() && !(t > rec.jump_times.back())) in.bad("jump times must be strictly increasing");
        if (t < rec.grid.t_start || t > rec.grid.t_end) in.bad("jump time outside the grid");
        rec.jump_times.push_back(t);
        rec.jump_channels.push_back(c);
    }
    std::size_t s = 0;
    {
        auto ls = in.next("snapshots");
        s = in.read<std::size_t>(ls);
        in.finish(ls);
    }
    for (std::size_t k = 0; k < s; ++k) {
        auto ls = in.next("");
        rec.snapshot_times.push_back(in.read<double>(ls));
        ComplexVector psi(rec.dim);
        for (Index i = 0; i < rec.dim; ++i) {
            const double re = in.read<double>(ls);
            const double im = in.read<double>(ls);
            psi(i) = Complex(re, im);
        }
        in.finish(ls);
        rec.snapshots.push_back(std::move(psi));
    }
    {
        auto ls = in.next("end");
        in.finish(ls);
    }
    if (rec.snapshots.empty()) rec.snapshot_times = rec.grid.sample_times();
    return rec;
}

}  // namespace qcoh

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
#include "qcoh/rng.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace qcoh {
namespace {

LindbladModel decay(double gamma, double rabi = 0.0) {
    return LindbladModel(0.5 * rabi * ops::pauli_x(), {{ops::transition(2, 0, 1), gamma}});
}

bool same(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    return serialize_trajectory(a) == serialize_trajectory(b);
}

TEST(CounterRng, MatchesReferenceConstruction) {
    // Straight transcription of the documented formula.
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const std::uint64_t seed = 12345, stream = 7;
    const std::uint64_t key = mix(seed ^ mix(stream ^ 0x6a09e667f3bcc909ULL));
    CounterRng rng(seed, stream);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const double want = static_cast<double>(mix(key + (k + 1) * 0x9e3779b97f4a7c15ULL) >> 11) / 9007199254740992.0;
        EXPECT_EQ(rng.uniform(), want);
    }
    EXPECT_EQ(rng.position(), 100u);
}

TEST(Trajectory, SameSeedSameRecord) {
    const auto model = decay(1.0, 2.0);
    const TimeGrid grid{0.0, 10.0, 1000, 10};
    const auto psi0 = QuantumState::basis(2, 0);
    EXPECT_TRUE(same(run_trajectory(psi0, model, grid, 9, 3), run_trajectory(psi0, model, grid, 9, 3)));
    EXPECT_FALSE(same(run_trajectory(psi0, model, grid, 9, 3), run_trajectory(psi0, model, grid, 9, 4)));
    EXPECT_FALSE(same(run_trajectory(psi0, model, grid, 9, 3), run_trajectory(psi0, model, grid, 10, 3)));
}

TEST(Trajectory, WorkerCountDoesNotChangeResults) {
    const auto model = decay(1.0, 2.0);
    const TimeGrid grid{0.0, 5.0, 500, 50};
    const auto psi0 = QuantumState::basis(2, 0);
    const auto one = run_ensemble(psi0, model, grid, 40, 77, {}, 1);
    const auto three = run_ensemble(psi0, model, grid, 40, 77, {}, 3);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_TRUE(same(one[i], three[i])) << i;
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_TRUE(same(one[i], run_trajectory(psi0, model, grid, 77, i)));
}

// Pure decay from |e>: dp is constant until the single jump, so the jump time
// follows from the documented draw order alone.
TEST(Trajectory, DrawOrderReproducible) {
    const double gamma = 0.7;
    const TimeGrid grid{0.0, 20.0, 2000, 2000};
    const double dt = grid.dt();
    const double dp = 1.0 - std::exp(-gamma * dt);
    for (std::uint64_t idx = 0; idx < 20; ++idx) {
        const auto rec = run_trajectory(QuantumState::basis(2, 1), decay(gamma), grid, 5, idx);
        CounterRng rng(5, idx);
        std::vector<double> want;
        for (std::size_t n = 0; n < grid.n_steps; ++n) {
            const double u = rng.uniform();
            if (u < dp) {
                want.push_back(grid.time_at(n) + dt * (u / dp));
                break;
            }
        }
        ASSERT_EQ(rec.jump_times.size(), want.size());
        if (!want.empty()) EXPECT_NEAR(rec.jump_times[0], want[0], 1e-12);
    }
}

TEST(Trajectory, WaitingTimeIsExponential) {
    const double gamma = 1.0;
    const std::size_t n = 2000;
    const TimeGrid grid{0.0, 20.0, 2000, 2000};
    TrajectoryOptions opts;
    opts.record_snapshots = false;
    const auto recs = run_ensemble(QuantumState::basis(2, 1), decay(gamma), grid, n, 2024, opts);
    std::vector<double> w;
    for (const auto& r : recs) w.push_back(r.jump_times.empty() ? grid.t_end : r.jump_times.front());
    std::sort(w.begin(), w.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-gamma * w[i]);
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    // Kolmogorov critical value at the 1% level.
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Trajectory, CoarseStepIsConfigurationError) {
    try {
        run_trajectory(QuantumState::basis(2, 1), decay(100.0), TimeGrid{0.0, 1.0, 100, 1}, 1);
        FAIL() << "expected Configuration error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Configuration);
    }
}

TEST(Trajectory, MixedInitialStateRejected) {
    EXPECT_THROW(run_trajectory(QuantumState::maximally_mixed(2), decay(1.0), TimeGrid{}, 1), Error);
}

TEST(Serialization, RoundTripIsExact) {
    const auto rec = run_trajectory(QuantumState::basis(2, 0), decay(1.0, 2.0), TimeGrid{0.0, 10.0, 1000, 100}, 3, 2);
    ASSERT_FALSE(rec.jump_times.empty());
    const auto back = parse_trajectory(serialize_trajectory(rec));
    EXPECT_EQ(back.seed, rec.seed);
    EXPECT_EQ(back.index, rec.index);
    EXPECT_EQ(back.jump_times, rec.jump_times);
    EXPECT_EQ(back.jump_channels, rec.jump_channels);
    ASSERT_EQ(back.snapshots.size(), rec.snapshots.size());
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) EXPECT_EQ(back.snapshots[k], rec.snapshots[k]);
    EXPECT_EQ(serialize_trajectory(back), serialize_trajectory(rec));
}

TEST(Serialization, MalformedInputIsIoError) {
    const auto text = serialize_trajectory(
        run_trajectory(QuantumState::basis(2, 0), decay(1.0, 2.0), TimeGrid{0.0, 2.0, 200, 100}, 3));
    const std::vector<std::string> bad{
        "",
        "qcoh-trajectory 2\n",
        text.substr(0, text.size() / 2),
        std::string(text).replace(text.find("dim 2"), 5, "dim x"),
        std::string(text).replace(text.find("end"), 3, "fin"),
    };
    for (const auto& b : bad) {
        try {
            parse_trajectory(b);
            ADD_FAILURE() << "accepted:\n" << b;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Io);
        }
    }
}

TEST(Aggregate, RejectsMismatchedRecords) {
    const auto a = run_trajectory(QuantumState::basis(2, 0), decay(1.0), TimeGrid{0.0, 1.0, 10, 5}, 1);
    const auto b = run_trajectory(QuantumState::basis(2, 0), decay(1.0), TimeGrid{0.0, 1.0, 10, 2}, 1);
    const TrajectoryRecord both[] = {a, b};
    EXPECT_THROW(aggregate(both), Error);
    EXPECT_THROW(aggregate(std::span<const TrajectoryRecord>{}), Error);
}

TEST(Ensemble, ConvergesToMasterEquation) {
    const auto model = decay(1.0, 3.0);
    const TimeGrid grid{0.0, 4.0, 800, 80};
    const auto rep = unraveling_equivalence_report(model, QuantumState::basis(2, 0), grid, 4000, 99);
    EXPECT_EQ(rep.flag_threshold, 5.0 / std::sqrt(4000.0));
    EXPECT_LT(rep.max_trace_distance, rep.flag_threshold);
    EXPECT_TRUE(std::none_of(rep.flagged.begin(), rep.flagged.end(), [](bool f) { return f; }));
    for (const auto& s : rep.trajectories.mean_state) EXPECT_NEAR(s.density().trace().real(), 1.0, 1e-12);
}

TEST(Ensemble, CheckpointsMatchFullAggregate) {
    const auto model = decay(1.0, 2.0);
    const TimeGrid grid{0.0, 2.0, 200, 50};
    const auto psi0 = QuantumState::basis(2, 0);
    const std::size_t cps[] = {10, 100};
    const auto est = run_ensemble_estimates(psi0, model, grid, 8, cps, 2);
    ASSERT_EQ(est.size(), 2u);
    const auto recs = run_ensemble(psi0, model, grid, 100, 8);
    const auto full = aggregate(recs);
    const auto head = aggregate(std::span<const TrajectoryRecord>(recs.data(), 10));
    for (std::size_t k = 0; k < full.times.size(); ++k) {
        EXPECT_LT(max_abs(est[1].mean_state[k].density() - full.mean_state[k].density()), 1e-14);
        EXPECT_LT(max_abs(est[0].mean_state[k].density() - head.mean_state[k].density()), 1e-14);
    }
}

}  // namespace
}  // namespace qcoh

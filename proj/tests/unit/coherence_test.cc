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
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace qcoh {
namespace {

TEST(Purity, PureAndMaximallyMixed) {
    std::mt19937_64 rng(1);
    EXPECT_NEAR(purity(QuantumState::pure(oracle::random_ket(5, rng))), 1.0, 1e-14);
    for (Index d : {1, 2, 3, 8}) EXPECT_NEAR(purity(QuantumState::maximally_mixed(d)), 1.0 / d, 1e-15);
}

TEST(Purity, BoundedForRandomStates) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const Index d = 2 + k % 5;
        const auto rho = QuantumState::mixed(oracle::random_density(d, 1 + k % d, rng));
        const double p = purity(rho);
        EXPECT_GE(p, 1.0 / d - 1e-12);
        EXPECT_LE(p, 1.0 + 1e-12);
        const oracle::M sq = oracle::matmul(rho.density(), rho.density());
        EXPECT_NEAR(p, sq.trace().real(), 1e-13);
    }
}

TEST(PopulationsCoherences, HadamardBasis) {
    const auto plus = QuantumState::pure(ops::hadamard().col(0));
    const auto comp = populations_coherences(plus, BasisSpec::computational(2));
    EXPECT_NEAR(comp.populations(0), 0.5, 1e-15);
    EXPECT_NEAR(comp.populations(1), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(comp.coherences(0, 1)), 0.5, 1e-15);
    EXPECT_EQ(comp.coherences(0, 0), Complex(0.0, 0.0));

    const auto had = populations_coherences(plus, BasisSpec("hadamard", ops::hadamard()));
    EXPECT_NEAR(had.populations(0), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(had.coherences(0, 1)), 0.0, 1e-15);
}

TEST(PopulationsCoherences, MatchesProjections) {
    std::mt19937_64 rng(4);
    const auto rho = QuantumState::mixed(oracle::random_density(4, 2, rng));
    const oracle::M u = oracle::random_unitary(4, rng);
    const auto pc = populations_coherences(rho, BasisSpec("random", u));
    const oracle::M inbasis = oracle::matmul(oracle::matmul(oracle::dag(u), rho.density()), u);
    for (Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(pc.populations(i), inbasis(i, i).real(), 1e-14);
        for (Index j = 0; j < 4; ++j)
            if (i != j) EXPECT_LT(std::abs(pc.coherences(i, j) - inbasis(i, j)), 1e-14);
    }
    EXPECT_NEAR(pc.populations.sum(), 1.0, 1e-14);
}

TEST(BasisSpec, RejectsNonOrthonormal) {
    ComplexMatrix v = ComplexMatrix::Identity(2, 2);
    v(0, 1) = 0.5;
    EXPECT_THROW(BasisSpec("bad", v), Error);
}

TEST(BasisChange, PreservesSpectrumAndPurity) {
    std::mt19937_64 rng(6);
    const auto rho = QuantumState::mixed(oracle::random_density(3, 2, rng));
    const oracle::M u = oracle::random_unitary(3, rng);
    const auto out = basis_change(rho, u);
    EXPECT_NEAR(purity(out), purity(rho), 1e-14);
    EXPECT_LT(max_abs(out.density() - oracle::matmul(oracle::matmul(u, rho.density()), oracle::dag(u))), 1e-14);
    ComplexMatrix notu = ComplexMatrix::Identity(3, 3) * 1.1;
    EXPECT_THROW(basis_change(rho, notu), Error);
}

TEST(Interference, SuperpositionVersusMixture) {
    // |psi> = (|0> + e^{i phi}|1>)/sqrt2 measured on |+>: (1 + cos phi)/2.
    const auto plus = QuantumState::pure(ops::hadamard().col(0));
    for (double phi : {0.0, 0.7, 2.0, 3.14159}) {
        ComplexVector v(2);
        v << 1.0, std::exp(kI * phi);
        const auto sup = QuantumState::pure(v / std::sqrt(2.0));
        EXPECT_NEAR(measurement_probability(sup, plus), 0.5 * (1.0 + std::cos(phi)), 1e-15);

        MixtureSpec spec{{{0.5, QuantumState::basis(2, 0)}, {0.5, QuantumState::basis(2, 1)}}};
        EXPECT_NEAR(measurement_probability(mix(spec), plus), 0.5, 1e-15);
    }
}

TEST(Mix, WeightedSumAndValidation) {
    std::mt19937_64 rng(9);
    const auto a = QuantumState::pure(oracle::random_ket(3, rng));
    const auto b = QuantumState::pure(oracle::random_ket(3, rng));
    const auto m = mix({{{0.3, a}, {0.7, b}}});
    EXPECT_LT(max_abs(m.density() - (0.3 * a.density() + 0.7 * b.density())), 1e-15);
    EXPECT_THROW(mix({{{0.3, a}, {0.6, b}}}), Error);
    EXPECT_THROW(mix({{{-0.1, a}, {1.1, b}}}), Error);
    EXPECT_THROW(mix({{{0.5, a}, {0.5, QuantumState::maximally_mixed(3)}}}), Error);
    EXPECT_THROW(mix({{{0.5, a}, {0.5, QuantumState::basis(2, 0)}}}), Error);
}

}  // namespace
}  // namespace qcoh

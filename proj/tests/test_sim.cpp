// Copyright 2026 The nucdyn Authors
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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nucdyn.hpp"
#include "oracles.hpp"

namespace {

using namespace nucdyn;
using oracle::cplx;

Eigen::VectorXcd random_state(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(dim);
    for (auto& x : v) x = {nd(rng), nd(rng)};
    return v / v.norm();
}

GateSequence random_circuit(int n, int length, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 3), q(0, n - 1);
    std::uniform_real_distribution<double> ang(-4.0, 4.0);
    GateSequence s(n);
    for (int i = 0; i < length; ++i) {
        switch (kind(rng)) {
        case 0: s.push(Gate::ry(q(rng), ang(rng))); break;
        case 1: s.push(Gate::rz(q(rng), ang(rng))); break;
        case 2: s.push(Gate::phase(ang(rng))); break;
        default:
            if (n < 2) break;
            const int c = q(rng);
            int t = q(rng);
            while (t == c) t = q(rng);
            s.push(Gate::cnot(c, t));
        }
    }
    return s;
}

EigenSystem double_well_eigen(int n) {
    const GridSpec g = build_grid(n, 0.66, 0.0, units::kProtonMass);
    return eigensolve(assemble_hamiltonian(g, daf_kinetic(g, {}), eval_potential(g, builtin_double_well())));
}

TEST(Propagator, IdentityAtTimeZero) {
    const auto es = double_well_eigen(4);
    EXPECT_LE((exact_propagator(es, 0.0) - Eigen::MatrixXcd::Identity(16, 16)).norm(), 1e-13);
}

TEST(Propagator, UnitaryAndSemigroup) {
    const auto es = double_well_eigen(5);
    const double t1 = units::fs_to_au(3.0), t2 = units::fs_to_au(4.5);
    const auto u1 = exact_propagator(es, t1), u2 = exact_propagator(es, t2);
    EXPECT_LE(unitarity_defect(u1), 1e-12);
    EXPECT_LE((u2 * u1 - exact_propagator(es, t1 + t2)).norm(), 1e-11);
}

TEST(Propagator, EigenstatePicksUpPhase) {
    const auto es = double_well_eigen(4);
    const double t = units::fs_to_au(2.0);
    const Eigen::VectorXcd chi = es.vectors.col(2).cast<cplx>();
    const Eigen::VectorXcd out = exact_propagator(es, t) * chi;
    EXPECT_LE((out - std::polar(1.0, -es.energies[2] * t) * chi).norm(), 1e-12);
}

TEST(Circuit, EmptyCircuitIsIdentity) {
    std::mt19937_64 rng(1);
    const auto psi = StateVector::from(random_state(8, rng));
    EXPECT_EQ((run_circuit(psi, GateSequence(3)).amplitudes - psi.amplitudes).norm(), 0.0);
}

TEST(Circuit, CnotTruthTable) {
    // |q1 q0> = |10>: control qubit 1 set, target qubit 0 flips -> |11>
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(4);
    in[0b10] = 1.0;
    GateSequence s(2);
    s.push(Gate::cnot(1, 0));
    const auto out = run_circuit(StateVector::from(in), s);
    EXPECT_EQ(std::abs(out.amplitudes[0b11]), 1.0);
    in.setZero();
    in[0b01] = 1.0;
    EXPECT_EQ(std::abs(run_circuit(StateVector::from(in), s).amplitudes[0b01]), 1.0);
}

TEST(Circuit, RandomCircuitsMatchDenseOracle) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        const auto seq = random_circuit(n, 30, rng);
        const auto psi = random_state(Eigen::Index{1} << n, rng);
        const Eigen::VectorXcd expected = oracle::circuit_matrix(seq) * psi;
        EXPECT_LE((run_circuit(StateVector::from(psi), seq).amplitudes - expected).norm(), 1e-11) << trial;
        EXPECT_LE((circuit_unitary(seq) - oracle::circuit_matrix(seq)).norm(), 1e-11) << trial;
    }
}

TEST(Circuit, NormDriftOverLongCircuit) {
    std::mt19937_64 rng(3);
    const auto seq = random_circuit(5, 100000, rng);
    const auto out = run_circuit(StateVector::from(random_state(32, rng)), seq);
    EXPECT_LE(std::abs(out.norm() - 1.0), 1e-12);
}

TEST(Circuit, CompiledUnitaryMatchesDirectProduct) {
    std::mt19937_64 rng(4);
    for (int n = 1; n <= 5; ++n) {
        const auto u = oracle::haar_unitary(Eigen::Index{1} << n, rng);
        const auto psi = random_state(u.rows(), rng);
        const auto out = run_circuit(StateVector::from(psi), qsd_compile(u));
        EXPECT_LE((out.amplitudes - u * psi).norm(), 1e-9) << n;
    }
}

TEST(Shots, BasisStateAlwaysObserved) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v[5] = cplx(0, 1);
    const auto r = sample_shots(StateVector::from(v), 1000, 42);
    EXPECT_EQ(r.counts[5], 1000u);
    EXPECT_EQ(r.frequencies()[5], 1.0);
}

TEST(Shots, UniformWithinFiveSigma) {
    const Eigen::VectorXcd v = Eigen::VectorXcd::Constant(16, 0.25);
    const std::uint64_t shots = 1000000;
    const auto r = sample_shots(StateVector::from(v), shots, 7);
    const double p = 1.0 / 16, sigma = std::sqrt(shots * p * (1 - p));
    std::uint64_t total = 0;
    for (auto c : r.counts) {
        EXPECT_LE(std::abs(static_cast<double>(c) - shots * p), 5 * sigma);
        total += c;
    }
    EXPECT_EQ(total, shots);
}

TEST(Shots, SeedDeterminism) {
    std::mt19937_64 rng(5);
    const auto psi = StateVector::from(random_state(16, rng));
    const auto a = sample_shots(psi, 5000, 99), b = sample_shots(psi, 5000, 99), c = sample_shots(psi, 5000, 100);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
}

TEST(Shots, RejectsBadInput) {
    const Eigen::VectorXcd v = Eigen::VectorXcd::Constant(4, 0.5);
    EXPECT_THROW(sample_shots(StateVector::from(v), 0, 1), ValidationError);
    EXPECT_THROW(sample_shots(StateVector::from(Eigen::VectorXcd(2 * v)), 10, 1), NumericalError);
}

TEST(Shots, TotalVariationScalesAsInverseRootShots) {
    std::mt19937_64 rng(6);
    const auto psi = StateVector::from(random_state(16, rng));
    const Eigen::VectorXd p = psi.probabilities();
    std::vector<double> shots{1e3, 1e4, 1e5, 1e6}, tv;
    for (double s : shots) {
        std::vector<double> per_seed;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto r = sample_shots(psi, static_cast<std::uint64_t>(s), seed);
            per_seed.push_back(0.5 * (r.frequencies() - p).cwiseAbs().sum());
        }
        tv.push_back(median(per_seed));
    }
    EXPECT_NEAR(loglog_slope(shots, tv), -0.5, 0.1);
}

TEST(Density, ExactAndMappedBases) {
    std::mt19937_64 rng(7);
    const int n = 4;
    const auto g = givens_map(n);
    const auto part = parity_partition(n);
    const Eigen::VectorXcd grid_state = random_state(16, rng);
    const auto mapped = StateVector::from(to_mapped_basis(grid_state, g, part));
    const Eigen::VectorXd rho = probability_density(mapped, Basis::Mapped, DensityMaps{&g, &part});
    EXPECT_LE((rho - grid_state.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(rho.sum(), 1.0, 1e-14);
    EXPECT_THROW(probability_density(mapped, Basis::Mapped), ValidationError);
    const Eigen::VectorXd direct = probability_density(StateVector::from(grid_state), Basis::Grid);
    EXPECT_LE((direct - grid_state.cwiseAbs2()).norm(), 0.0);
}

TEST(Density, ShotsInMappedBasis) {
    std::mt19937_64 rng(8);
    const int n = 3;
    const auto g = givens_map(n);
    const auto part = parity_partition(n);
    const Eigen::VectorXcd grid_state = random_state(8, rng);
    const Eigen::VectorXd ref = grid_state.cwiseAbs2();
    const auto mapped = StateVector::from(to_mapped_basis(grid_state, g, part));
    const auto r = sample_shots(mapped, 200000, 3);
    const Eigen::VectorXd rho = probability_density(r, Basis::Mapped, DensityMaps{&g, &part}, &ref);
    EXPECT_NEAR(rho.sum(), 1.0, 1e-12);
    EXPECT_LE((rho - ref).cwiseAbs().maxCoeff(), 0.01);
    EXPECT_THROW(probability_density(r, Basis::Mapped, DensityMaps{&g, &part}), ValidationError);
    EXPECT_NEAR(probability_density(r, Basis::Grid).sum(), 1.0, 1e-12);
}

}  // namespace

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

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "nucdyn.hpp"
#include "oracles.hpp"

namespace {

using namespace nucdyn;

NuclearHamiltonian model(int n, const PotentialSource& v) {
    const GridSpec g = build_grid(n, 0.66, 0.0, units::kProtonMass);
    return assemble_hamiltonian(g, daf_kinetic(g, {}), eval_potential(g, v));
}

TEST(Givens, Orthogonal) {
    for (int n = 1; n <= 8; ++n) {
        const auto g = givens_map(n);
        const auto dim = static_cast<Eigen::Index>(g.dim());
        EXPECT_LE((g.matrix * g.matrix.transpose() - Eigen::MatrixXd::Identity(dim, dim)).norm(), 1e-14) << n;
    }
}

TEST(Givens, PairStructure) {
    const double r = std::sqrt(0.5);
    for (int n = 1; n <= 6; ++n) {
        const auto g = givens_map(n);
        const auto dim = static_cast<Eigen::Index>(g.dim());
        for (Eigen::Index i = 0; i < dim; ++i) {
            const Eigen::Index partner = dim - 1 - i;
            EXPECT_EQ(g.matrix.row(i).cwiseAbs().sum(), 2 * r);
            EXPECT_EQ(g.matrix(i, i), r);
            EXPECT_EQ(g.matrix(i, partner), i < dim / 2 ? r : -r);
        }
    }
}

TEST(Givens, ThreeQubitRows) {
    const auto g = givens_map(3);
    const double r = std::sqrt(0.5);
    Eigen::RowVectorXd row0 = Eigen::RowVectorXd::Zero(8), row7 = Eigen::RowVectorXd::Zero(8);
    row0[0] = r;
    row0[7] = r;
    row7[0] = -r;
    row7[7] = r;
    EXPECT_EQ((g.matrix.row(0) - row0).norm(), 0.0);
    EXPECT_EQ((g.matrix.row(7) - row7).norm(), 0.0);
}

TEST(Givens, ApplyMatchesMatrix) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int n = 1; n <= 6; ++n) {
        const auto g = givens_map(n);
        Eigen::VectorXd x(static_cast<Eigen::Index>(g.dim()));
        for (auto& v : x) v = nd(rng);
        EXPECT_LE((g.apply(x) - g.matrix * x).norm(), 1e-14);
        EXPECT_LE((g.apply_transpose(x) - g.matrix.transpose() * x).norm(), 1e-14);
    }
}

TEST(Parity, SmallPartitions) {
    EXPECT_EQ(parity_partition(1).order, (std::vector<std::uint32_t>{0, 1}));
    EXPECT_EQ(parity_partition(2).order, (std::vector<std::uint32_t>{0b00, 0b11, 0b01, 0b10}));
    EXPECT_EQ(parity_partition(3).order, (std::vector<std::uint32_t>{0, 3, 5, 6, 1, 2, 4, 7}));
}

TEST(Parity, BijectionAndEvenHammingWithinBlocks) {
    for (int n = 1; n <= 10; ++n) {
        const auto p = parity_partition(n);
        std::set<std::uint32_t> seen(p.order.begin(), p.order.end());
        EXPECT_EQ(seen.size(), p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i) EXPECT_EQ(p.position[p.order[i]], i);
        for (int b = 0; b < 2; ++b) {
            const auto states = p.block_states(b);
            EXPECT_EQ(states.size(), p.block_size());
            for (std::size_t i = 0; i + 1 < states.size(); ++i) EXPECT_LT(states[i], states[i + 1]);
            for (auto s : states) {
                EXPECT_EQ(std::popcount(s) % 2, b);
                EXPECT_EQ(std::popcount(s ^ states.front()) % 2, 0);
            }
        }
    }
}

TEST(Block, SingleQubitClosedForm) {
    const double k0 = 0.7, k1 = -0.2, v0 = 0.05, v1 = 0.11;
    Eigen::MatrixXd h(2, 2);
    h << k0 + v0, k1, k1, k0 + v1;
    const auto bh = block_transform(h, givens_map(1));
    EXPECT_NEAR(bh.transformed(0, 0), k0 + k1 + 0.5 * (v0 + v1), 1e-15);
    EXPECT_NEAR(bh.transformed(1, 1), k0 - k1 + 0.5 * (v0 + v1), 1e-15);
    EXPECT_NEAR(bh.transformed(0, 1), 0.5 * (v1 - v0), 1e-15);
    EXPECT_NEAR(bh.coupling_residual, std::sqrt(2.0) * 0.5 * std::abs(v1 - v0), 1e-15);
    EXPECT_LE(bh.closed_form_deviation, 1e-15);
}

TEST(Block, SymmetricPotentialDecouples) {
    for (int n = 1; n <= 7; ++n) {
        const auto h = model(n, builtin_double_well());
        const auto bh = block_transform(h, givens_map(n));
        EXPECT_LE(bh.coupling_residual, 1e-12 * bh.source_norm) << n;
        EXPECT_LE(bh.closed_form_deviation, 1e-12 * bh.source_norm) << n;
    }
}

TEST(Block, AsymmetricCouplingEqualsAntisymmetricPart) {
    for (int n = 1; n <= 7; ++n) {
        const auto h = model(n, AnalyticPotential::polynomial({0.0, 3.0, 10.0, 0.5, 40.0}));
        const auto bh = block_transform(h, givens_map(n));
        const Eigen::VectorXd v = h.matrix.diagonal();
        const auto dim = v.size();
        double anti = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) anti += std::pow(0.5 * (v[i] - v[dim - 1 - i]), 2);
        EXPECT_NEAR(bh.coupling_residual, std::sqrt(anti), 1e-12 * bh.source_norm) << n;
        EXPECT_GT(bh.coupling_residual, 0.0);
        EXPECT_LE(bh.closed_form_deviation, 1e-12 * bh.source_norm) << n;
    }
}

TEST(Block, SpectrumPreserved) {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 6; ++n) {
        const auto dim = Eigen::Index{1} << n;
        const Eigen::MatrixXd h = oracle::random_symmetric(dim, rng);
        const auto bh = block_transform(h, givens_map(n));
        const Eigen::VectorXd e0 = eigensolve(h).energies, e1 = eigensolve(bh.transformed).energies;
        EXPECT_LE((e0 - e1).cwiseAbs().maxCoeff(), 1e-12 * h.norm()) << n;
    }
}

TEST(Block, BlockSpectraInterleave) {
    for (int n = 2; n <= 7; ++n) {
        const auto h = model(n, builtin_double_well());
        const auto bh = block_transform(h, givens_map(n));
        const auto full = eigensolve(h).energies;
        const auto ea = eigensolve(bh.block_a).energies, eb = eigensolve(bh.block_b).energies;
        Eigen::VectorXd joined(full.size());
        joined << ea, eb;
        std::sort(joined.begin(), joined.end());
        EXPECT_LE((joined - full).cwiseAbs().maxCoeff(), 1e-10 * full.cwiseAbs().maxCoeff()) << n;
        // low-lying levels alternate between the symmetric and antisymmetric blocks
        for (Eigen::Index j = 0; j < std::min<Eigen::Index>(4, ea.size()); ++j) {
            EXPECT_LT(ea[j], eb[j]) << n << " level " << j;
            if (j + 1 < ea.size()) {
                EXPECT_LT(eb[j], ea[j + 1]) << n << " level " << j;
            }
        }
    }
}

TEST(Block, RejectsMismatchedDimensions) {
    EXPECT_THROW(block_transform(Eigen::MatrixXd::Identity(4, 4), givens_map(3)), ValidationError);
}

TEST(Mapped, RoundTripAndNorm) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int n = 1; n <= 8; ++n) {
        const auto g = givens_map(n);
        const auto p = parity_partition(n);
        Eigen::VectorXcd x(static_cast<Eigen::Index>(g.dim()));
        for (auto& v : x) v = {nd(rng), nd(rng)};
        const Eigen::VectorXcd m = to_mapped_basis(x, g, p);
        EXPECT_NEAR(m.norm(), x.norm(), 1e-13);
        EXPECT_LE((from_mapped_basis(m, g, p) - x).norm(), 1e-14 * x.norm());
    }
}

TEST(Mapped, FirstSymmetricPairIsAllZeros) {
    const auto g = givens_map(3);
    const auto p = parity_partition(3);
    Eigen::VectorXd pair = Eigen::VectorXd::Zero(8);
    pair[0] = pair[7] = std::sqrt(0.5);
    const Eigen::VectorXd m = to_mapped_basis(pair, g, p);
    EXPECT_NEAR(m[0], 1.0, 1e-15);
    EXPECT_NEAR(m.norm(), 1.0, 1e-15);
}

TEST(Mapped, OperatorConsistency) {
    const int n = 4;
    const auto h = model(n, AnalyticPotential::polynomial({0.0, 3.0, 10.0}));
    const auto g = givens_map(n);
    const auto p = parity_partition(n);
    const auto bh = block_transform(h, g);
    const Eigen::MatrixXd hc = permute_to_computational(bh.transformed, p);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(16);
    for (auto& v : x) v = nd(rng);
    const Eigen::VectorXd lhs = hc * to_mapped_basis(x, g, p);
    const Eigen::VectorXd rhs = to_mapped_basis(Eigen::VectorXd(h.matrix * x), g, p);
    EXPECT_LE((lhs - rhs).norm(), 1e-13 * h.matrix.norm() * x.norm());
}

}  // namespace

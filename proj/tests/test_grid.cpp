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
#include <filesystem>
#include <fstream>
#include <random>

#include "nucdyn.hpp"
#include "oracles.hpp"

namespace {

using namespace nucdyn;

NuclearHamiltonian double_well_hamiltonian(int n, DafParams daf = {}) {
    const GridSpec g = build_grid(n, 0.66, 0.0, units::kProtonMass);
    return assemble_hamiltonian(g, daf_kinetic(g, daf), eval_potential(g, builtin_double_well()));
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("nucdyn_grid_" + name);
    std::ofstream(path) << body;
    return path;
}

TEST(Grid, SpacingForThreeAndSevenQubits) {
    const GridSpec g3 = build_grid(3, 0.66, 0.0, units::kProtonMass);
    EXPECT_EQ(g3.num_points(), 8u);
    EXPECT_NEAR(g3.spacing_angstrom(), 0.094, 5e-4);
    const GridSpec g7 = build_grid(7, 0.66, 0.0, units::kProtonMass);
    EXPECT_EQ(g7.num_points(), 128u);
    EXPECT_NEAR(g7.spacing_angstrom(), 0.0052, 1e-4);
}

TEST(Grid, SingleQubitEndpoints) {
    const GridSpec g = build_grid(1, 1.0, 0.0, units::kProtonMass);
    EXPECT_DOUBLE_EQ(g.point_angstrom(0), -0.5);
    EXPECT_DOUBLE_EQ(g.point_angstrom(1), 0.5);
}

TEST(Grid, PointsMirrorAboutCentre) {
    for (int n = 1; n <= 8; ++n) {
        const GridSpec g = build_grid(n, 0.66, 0.3, units::kDeuteronMass);
        for (std::size_t i = 0; i < g.num_points(); ++i)
            EXPECT_NEAR(g.point_angstrom(i) + g.point_angstrom(g.mirror(i)), 0.6, 1e-14);
        EXPECT_NEAR(g.point_angstrom(g.num_points() - 1) - g.point_angstrom(0), 0.66, 1e-14);
    }
}

TEST(Grid, RejectsBadArguments) {
    EXPECT_THROW(build_grid(0, 0.66, 0.0, 1.0), ValidationError);
    EXPECT_THROW(build_grid(13, 0.66, 0.0, 1.0), ValidationError);
    EXPECT_THROW(build_grid(3, 0.0, 0.0, 1.0), ValidationError);
    EXPECT_THROW(build_grid(3, -1.0, 0.0, 1.0), ValidationError);
    EXPECT_THROW(build_grid(3, 0.66, 0.0, 0.0), ValidationError);
    EXPECT_THROW(build_grid(3, 0.66, 0.0, -5.0), ValidationError);
    EXPECT_THROW(build_grid(3, std::nan(""), 0.0, 1.0), ValidationError);
}

TEST(Potential, HarmonicIsSymmetric) {
    const GridSpec g = build_grid(5, 0.66, 0.0, units::kProtonMass);
    const PotentialSurface s = eval_potential(g, AnalyticPotential::harmonic(50.0));
    EXPECT_TRUE(s.symmetric);
    EXPECT_EQ(s.asymmetry(), 0.0);
}

TEST(Potential, DoubleWellMinimaAndBarrier) {
    const auto v = AnalyticPotential::double_well(1.0, 2.0);
    EXPECT_DOUBLE_EQ(v.evaluate_kcal(0.0), 0.0);
    EXPECT_DOUBLE_EQ(v.evaluate_kcal(1.0), -1.0);
    EXPECT_DOUBLE_EQ(v.evaluate_kcal(-1.0), -1.0);
    const double h = 1e-5;
    for (double u : {-1.0, 1.0}) {
        EXPECT_NEAR((v.evaluate_kcal(u + h) - v.evaluate_kcal(u - h)) / (2 * h), 0.0, 1e-8);
        EXPECT_GT(v.evaluate_kcal(u + 0.01), v.evaluate_kcal(u));
        EXPECT_GT(v.evaluate_kcal(u - 0.01), v.evaluate_kcal(u));
    }
}

TEST(Potential, BuiltinDoubleWellShape) {
    const auto v = builtin_double_well();
    EXPECT_NEAR(v.evaluate_kcal(0.0) - v.evaluate_kcal(0.12), 1.0, 1e-12);
    EXPECT_NEAR(v.evaluate_kcal(0.12), v.evaluate_kcal(-0.12), 1e-15);
}

TEST(Potential, TableReproducesLinearDataExactly) {
    // Monotone cubic interpolation reproduces linear data, so every grid
    // point matches the generating polynomial.
    std::string csv = "x_angstrom,energy_hartree\n";
    auto f = [](double x) { return 0.002 + 0.01 * x; };
    for (int i = 0; i < 5; ++i) {
        const double x = -0.4 + 0.2 * i;
        csv += std::to_string(x) + "," + io::num(f(x)) + "\n";
    }
    const auto path = write_temp("linear.csv", csv);
    const auto table = read_potential_csv(path.string());
    ASSERT_EQ(table.x_angstrom.size(), 5u);
    const GridSpec g = build_grid(3, 0.8, 0.0, units::kProtonMass);
    const PotentialSurface s = eval_potential(g, table);
    EXPECT_EQ(s.source, PotentialSurface::Source::Tabulated);
    for (std::size_t i = 0; i < g.num_points(); ++i)
        EXPECT_NEAR(s.values[static_cast<Eigen::Index>(i)], f(g.point_angstrom(i)), 1e-15);
}

TEST(Potential, TableMatchesQuarticAtSharedNodes) {
    auto f = [](double x) { return 0.01 * (x * x * x * x) - 0.003 * x * x + 0.001 * x; };
    std::string csv = "x_angstrom,energy_hartree\n";
    for (int i = 0; i < 5; ++i) {
        const double x = -0.35 + 0.175 * i;
        csv += io::num(x) + "," + io::num(f(x)) + "\n";
    }
    const auto path = write_temp("quartic.csv", csv);
    const GridSpec g = build_grid(3, 0.7, 0.0, units::kProtonMass);
    const PotentialSurface s = eval_potential(g, read_potential_csv(path.string()));
    // endpoints coincide with table nodes
    EXPECT_NEAR(s.values[0], f(-0.35), 1e-15);
    EXPECT_NEAR(s.values[7], f(0.35), 1e-15);
    for (std::size_t i = 0; i < g.num_points(); ++i)
        EXPECT_NEAR(s.values[static_cast<Eigen::Index>(i)], f(g.point_angstrom(i)), 2e-4);
    EXPECT_FALSE(s.symmetric);
}

TEST(Potential, TableErrorsNameThePath) {
    const auto bad = write_temp("bad.csv", "x_angstrom,energy_hartree\n0.0,1\n-0.1,2\n0.2,3\n");
    try {
        read_potential_csv(bad.string());
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos) << e.what();
    }
    const std::string missing = "/nonexistent/dir/surface.csv";
    try {
        read_potential_csv(missing);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find(missing), std::string::npos) << e.what();
    }
}

TEST(Potential, TableMustCoverGrid) {
    const auto path = write_temp("short.csv", "x_angstrom,energy_hartree\n-0.1,0\n0,0\n0.1,0\n");
    const GridSpec g = build_grid(3, 0.66, 0.0, units::kProtonMass);
    EXPECT_THROW(eval_potential(g, read_potential_csv(path.string())), ValidationError);
}

TEST(Potential, NonFiniteValuesRejected) {
    const GridSpec g = build_grid(2, 0.66, 0.0, units::kProtonMass);
    EXPECT_THROW(eval_potential(g, AnalyticPotential::polynomial({std::nan("")})), ValidationError);
}

TEST(Kinetic, ToeplitzAndSymmetric) {
    const GridSpec g = build_grid(5, 0.66, 0.0, units::kProtonMass);
    const KineticOperator k = daf_kinetic(g, {});
    const auto n = k.matrix.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            EXPECT_EQ(k.matrix(i, j), k.matrix(j, i));
            if (i > 0 && j > 0) {
                EXPECT_EQ(k.matrix(i, j), k.matrix(i - 1, j - 1));
            }
        }
    EXPECT_GT(k.matrix(0, 0), 0.0);
}

TEST(Kinetic, RejectsBadParameters) {
    const GridSpec g = build_grid(3, 0.66, 0.0, units::kProtonMass);
    EXPECT_THROW(daf_kinetic(g, DafParams{3, 1.5}), ValidationError);
    EXPECT_THROW(daf_kinetic(g, DafParams{20, 0.0}), ValidationError);
}

// omega chosen so that about six levels sit well inside the box
TEST(Kinetic, HarmonicLadder) {
    const double omega = 0.03;
    const GridSpec g = build_grid(7, 0.66, 0.0, units::kProtonMass);
    const auto h = assemble_hamiltonian(g, daf_kinetic(g, {}), eval_potential(g, oracle::harmonic_for(g.mass, omega)));
    const EigenSystem es = eigensolve(h);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(es.energies[j] / (omega * (j + 0.5)), 1.0, 1e-3) << "level " << j;
    for (int j = 0; j < 3; ++j)
        EXPECT_NEAR((es.energies[j + 1] - es.energies[j]) / omega, 1.0, 5e-3) << "gap " << j;
}

TEST(Kinetic, FreeParticleMatchesFftOnPeriodicGrid) {
    const GridSpec g = build_grid(7, 2.0, 0.0, units::kProtonMass);
    const KineticOperator k = daf_kinetic(g, {});
    const Eigen::MatrixXd c = oracle::periodize(k.profile);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    const auto ref = oracle::fft_kinetic_spectrum(g.num_points(), g.spacing_bohr(), g.mass);
    EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-3 * ref[1]);
    for (Eigen::Index j = 1; j <= 16; ++j)
        EXPECT_NEAR(es.eigenvalues()[j] / ref[static_cast<std::size_t>(j)], 1.0, 1e-3) << "mode " << j;
}

TEST(Hamiltonian, ZeroPotentialGivesKinetic) {
    const GridSpec g = build_grid(4, 0.66, 0.0, units::kProtonMass);
    const KineticOperator k = daf_kinetic(g, {});
    const auto h = assemble_hamiltonian(g, k, eval_potential(g, AnalyticPotential::polynomial({0.0})));
    EXPECT_EQ((h.matrix - k.matrix).norm(), 0.0);
}

TEST(Hamiltonian, DiagonalCarriesPotential) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    const GridSpec g = build_grid(4, 0.66, 0.0, units::kProtonMass);
    const KineticOperator k = daf_kinetic(g, {});
    Eigen::VectorXd v(16);
    for (auto& x : v) x = u(rng);
    const auto h = assemble_hamiltonian(g, k, make_surface(v, PotentialSurface::Source::Tabulated));
    EXPECT_LE((h.matrix.diagonal() - k.matrix.diagonal() - v).cwiseAbs().maxCoeff(), 1e-16 * k.matrix(0, 0));
    EXPECT_EQ((h.matrix - h.matrix.transpose()).norm(), 0.0);
}

TEST(Hamiltonian, DimensionMismatchRejected) {
    const GridSpec g3 = build_grid(3, 0.66, 0.0, units::kProtonMass);
    const GridSpec g4 = build_grid(4, 0.66, 0.0, units::kProtonMass);
    EXPECT_THROW(assemble_hamiltonian(g4, daf_kinetic(g3, {}), eval_potential(g4, builtin_double_well())),
                 ValidationError);
}

TEST(Eigen, DiagonalMatrix) {
    Eigen::MatrixXd d = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0).asDiagonal();
    const EigenSystem es = eigensolve(d);
    for (Eigen::Index j = 0; j < 6; ++j) {
        EXPECT_NEAR(es.energies[j], j + 1.0, 1e-14);
        EXPECT_NEAR(std::abs(es.vectors(j, j)), 1.0, 1e-14);
    }
}

TEST(Eigen, ReconstructionOrthonormalitySigns) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd h = oracle::random_symmetric(32, rng);
    const EigenSystem es = eigensolve(h);
    const double scale = h.norm();
    EXPECT_LE((es.vectors * es.energies.asDiagonal() * es.vectors.transpose() - h).norm(), 1e-12 * scale);
    EXPECT_LE((es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(32, 32)).norm(), 1e-12);
    for (Eigen::Index j = 0; j + 1 < es.size(); ++j) EXPECT_LE(es.energies[j], es.energies[j + 1]);
    for (Eigen::Index j = 0; j < es.size(); ++j) {
        Eigen::Index i = 0;
        while (std::abs(es.vectors(i, j)) <= 1e-12) ++i;
        EXPECT_GT(es.vectors(i, j), 0.0);
    }
}

TEST(Eigen, ReflectionCommutesForSymmetricWell) {
    const auto h = double_well_hamiltonian(5);
    const auto n = h.dim();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) r(i, n - 1 - i) = 1.0;
    EXPECT_LE((h.matrix * r - r * h.matrix).norm(), 1e-13 * h.matrix.norm());
}

Eigen::VectorXd lowest(const NuclearHamiltonian& h, int count) {
    return eigensolve(h).energies.head(count);
}

// Literal form: at the default order and width ratio, doubling the order
// leaves the spectrum unchanged to 1e-10.
TEST(DafConvergence, DoublingOrderAtFixedWidthRatio) {
    const auto base = lowest(double_well_hamiltonian(6, DafParams{20, 1.5}), 4);
    const auto doubled = lowest(double_well_hamiltonian(6, DafParams{40, 1.5}), 4);
    for (Eigen::Index j = 0; j < 4; ++j)
        EXPECT_LE(std::abs(doubled[j] - base[j]) / std::abs(base[j]), 1e-10) << "level " << j;
}

// Width scaled with sqrt(order) keeps the filter band fixed; the low
// spectrum then settles to the quadrature accuracy of the grid.
TEST(DafConvergence, DoublingOrderWithScaledWidth) {
    const auto base = lowest(double_well_hamiltonian(6, DafParams{20, 1.5}), 4);
    const auto doubled = lowest(double_well_hamiltonian(6, DafParams{40, 1.5 * std::sqrt(2.0)}), 4);
    for (Eigen::Index j = 0; j < 4; ++j)
        EXPECT_LE(std::abs(doubled[j] - base[j]) / std::abs(base[j]), 1e-3) << "level " << j;
}

}  // namespace

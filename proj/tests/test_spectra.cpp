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

#include "nucdyn.hpp"
#include "oracles.hpp"

namespace {

using namespace nucdyn;
using cplx = std::complex<double>;

PropagationModel model(int n, const PotentialSource& v, double length = 0.66) {
    const GridSpec g = build_grid(n, length, 0.0, units::kProtonMass);
    return make_model(assemble_hamiltonian(g, daf_kinetic(g, {}), eval_potential(g, v)));
}

SpectrumOptions hann() {
    SpectrumOptions o;
    o.hann = true;
    return o;
}

double line_cm1(const EigenSystem& es, int j, int i) {
    return units::hartree_to_wavenumber(es.energies[j] - es.energies[i]);
}

TEST(Spectrum, StationaryStateHasNoPeaks) {
    const auto m = model(4, builtin_double_well());
    const Eigen::VectorXcd chi0 = m.eigen.vectors.col(0).cast<cplx>();
    const auto t = propagate_classical(m, chi0, TimeGrid{0.5, 512});
    const auto g = grid_spectrum(t, m.hamiltonian.grid.spacing_angstrom());
    EXPECT_TRUE(g.peaks.empty());
    const auto a = autocorrelation_spectrum(t);
    EXPECT_TRUE(a.peaks.empty());
    EXPECT_NEAR(a.zero_weight, 1.0, 1e-12);
    EXPECT_THROW(compare_eigendiffs(a, m.eigen), NumericalError);
}

TEST(Spectrum, TwoStateSuperpositionGivesOneLine) {
    const auto m = model(5, builtin_double_well());
    const Eigen::VectorXcd psi = ((m.eigen.vectors.col(0) + m.eigen.vectors.col(1)) / std::sqrt(2.0)).cast<cplx>();
    const auto t = propagate_classical(m, psi, TimeGrid{0.5, 2048});
    const double line = line_cm1(m.eigen, 1, 0);
    const auto g = grid_spectrum(t, m.hamiltonian.grid.spacing_angstrom(), hann());
    ASSERT_EQ(g.peaks.size(), 1u);
    EXPECT_LE(std::abs(g.peaks[0].omega_cm1 - line), g.bin_cm1);
    const auto a = autocorrelation_spectrum(t, hann());
    ASSERT_EQ(a.peaks.size(), 1u);
    EXPECT_LE(std::abs(a.peaks[0].omega_cm1 - g.peaks[0].omega_cm1), a.bin_cm1);
    // C(t) = 1/2 + 1/2 cos(w t): cosine weight 2 p0 p1 = 0.5
    EXPECT_NEAR(a.peaks[0].weight / 0.5, 1.0, 0.05);
    EXPECT_NEAR(a.zero_weight, 0.5, 1e-3);
}

TEST(Spectrum, AutocorrelationWeightsFollowPopulations) {
    const auto m = model(5, builtin_double_well());
    const double p0 = 0.7, p1 = 0.3;
    const Eigen::VectorXcd psi =
        (std::sqrt(p0) * m.eigen.vectors.col(0) + std::sqrt(p1) * m.eigen.vectors.col(1)).cast<cplx>();
    const auto a = autocorrelation_spectrum(propagate_classical(m, psi, TimeGrid{0.5, 2048}), hann());
    ASSERT_EQ(a.peaks.size(), 1u);
    EXPECT_NEAR(a.peaks[0].weight / (2 * p0 * p1), 1.0, 0.05);
}

TEST(Spectrum, HarmonicPeaksSitOnMultiplesOfOmega) {
    const double omega = 0.03;
    const GridSpec grid = build_grid(7, 0.66, 0.0, units::kProtonMass);
    const auto m = model(7, oracle::harmonic_for(grid.mass, omega));
    const auto psi = initial_wavepacket(WavepacketSpec::gaussian(-0.05, 0.07), m.hamiltonian.grid);
    const auto t = propagate_classical(m, psi, TimeGrid{0.25, 4000});
    const auto sp = grid_spectrum(t, m.hamiltonian.grid.spacing_angstrom(), hann());
    ASSERT_FALSE(sp.peaks.empty());
    const double w_cm1 = units::hartree_to_wavenumber(omega);
    for (const auto& pk : sp.peaks) {
        const double multiple = std::round(pk.omega_cm1 / w_cm1);
        EXPECT_GE(multiple, 1.0);
        EXPECT_LE(std::abs(pk.omega_cm1 - multiple * w_cm1), sp.resolution_cm1) << pk.omega_cm1;
    }
}

TEST(Spectrum, PeaksMatchEigenDifferences) {
    const auto m = model(5, builtin_double_well());
    const auto psi = initial_wavepacket(WavepacketSpec::gaussian(-0.2, 0.1), m.hamiltonian.grid);
    const auto t = propagate_classical(m, psi, TimeGrid{0.25, 4000});
    const auto sp = grid_spectrum(t, m.hamiltonian.grid.spacing_angstrom(), hann());
    ASSERT_GE(sp.peaks.size(), 3u);
    for (std::size_t i = 1; i < sp.peaks.size(); ++i) EXPECT_LT(sp.peaks[i - 1].omega_cm1, sp.peaks[i].omega_cm1);
    for (const auto& match : compare_eigendiffs(sp, m.eigen))
        EXPECT_LE(match.error_cm1, 0.5 * sp.resolution_cm1) << match.peak.omega_cm1;
    for (const auto& lv : level_difference_errors(sp, m.eigen, 3)) EXPECT_LE(lv.error_cm1, 0.5 * sp.resolution_cm1);
    EXPECT_THROW(level_difference_errors(sp, m.eigen, 32), ValidationError);
}

TEST(Spectrum, ParsevalWithoutWindowOrPadding) {
    const auto m = model(4, builtin_double_well());
    const auto psi = initial_wavepacket(WavepacketSpec::gaussian(-0.15, 0.08), m.hamiltonian.grid);
    const auto t = propagate_classical(m, psi, TimeGrid{0.5, 300});
    SpectrumOptions o;
    o.padding = 1;
    const double dx = m.hamiltonian.grid.spacing_angstrom();
    const auto sp = grid_spectrum(t, dx, o);
    double energy = 0.0;
    for (Eigen::Index c = 0; c < t.densities.cols(); ++c)
        energy += (t.densities.col(c).array() - t.densities.col(c).mean()).square().sum() * dx;
    EXPECT_NEAR(sp.total_power() / energy, 1.0, 1e-8);
    // padding spreads the same power over more bins
    o.padding = 4;
    EXPECT_NEAR(grid_spectrum(t, dx, o).total_power() / energy, 1.0, 1e-8);
}

TEST(Spectrum, Resolution) {
    const auto m = model(3, builtin_double_well());
    const auto psi = initial_wavepacket(WavepacketSpec::delta(), m.hamiltonian.grid);
    const auto sp = grid_spectrum(propagate_classical(m, psi, TimeGrid{0.25, 8000}), 0.1);
    EXPECT_NEAR(sp.resolution_cm1, 16.678, 1e-3);
    EXPECT_NEAR(sp.nyquist_cm1, 66712.8, 0.1);
    EXPECT_NEAR(sp.bin_cm1 * 4.0 * 8001.0 / 8000.0, sp.resolution_cm1, 1e-9);
}

TEST(Spectrum, InputValidation) {
    const auto m = model(3, builtin_double_well());
    const auto psi = initial_wavepacket(WavepacketSpec::delta(), m.hamiltonian.grid);
    EXPECT_THROW(grid_spectrum(propagate_classical(m, psi, TimeGrid{0.5, 63}), 0.1), ValidationError);
    auto t = propagate_classical(m, psi, TimeGrid{0.5, 128});
    EXPECT_THROW(grid_spectrum(t, 0.0), ValidationError);
    SpectrumOptions bad;
    bad.padding = 0;
    EXPECT_THROW(grid_spectrum(t, 0.1, bad), ValidationError);
    bad = {};
    bad.threshold = 1.5;
    EXPECT_THROW(grid_spectrum(t, 0.1, bad), ValidationError);
    Trajectory skew = t;
    skew.times_fs[10] += 0.1;
    EXPECT_THROW(grid_spectrum(skew, 0.1), ValidationError);
    Trajectory shots = t;
    shots.method = Method::CircuitShots;
    shots.amplitudes.reset();
    EXPECT_THROW(autocorrelation_spectrum(shots), ValidationError);
}

TEST(Spectrum, FoldedFrequency) {
    EXPECT_NEAR(folded_frequency(150.0, 100.0), 50.0, 1e-12);
    EXPECT_NEAR(folded_frequency(220.0, 100.0), 20.0, 1e-12);
    EXPECT_NEAR(folded_frequency(80.0, 100.0), 80.0, 1e-12);
}

}  // namespace

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

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/qsd.hpp"
#include "nucdyn/transforms.hpp"

namespace nucdyn {

// ---------------------------------------------------------------------------
// Gate kernels

/// Applies g to every column of m (a state vector is a one-column matrix).
template <typename Derived>
void apply_gate(Eigen::MatrixBase<Derived>& m, const Gate& g) {
    const Eigen::Index dim = m.rows();
    switch (g.kind) {
    case GateKind::GlobalPhase:
        m *= std::polar(1.0, g.angle);
        return;
    case GateKind::CNOT: {
        const Eigen::Index cbit = Eigen::Index{1} << g.control, tbit = Eigen::Index{1} << g.target;
        for (Eigen::Index i = 0; i < dim; ++i)
            if ((i & cbit) && !(i & tbit)) m.row(i).swap(m.row(i | tbit));
        return;
    }
    case GateKind::Ry: {
        const Eigen::Index tbit = Eigen::Index{1} << g.target;
        const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & tbit) continue;
            for (Eigen::Index col = 0; col < m.cols(); ++col) {
                const auto a0 = m(i, col), a1 = m(i | tbit, col);
                m(i, col) = c * a0 - s * a1;
                m(i | tbit, col) = s * a0 + c * a1;
            }
        }
        return;
    }
    case GateKind::Rz: {
        const Eigen::Index tbit = Eigen::Index{1} << g.target;
        const std::complex<double> p0 = std::polar(1.0, -g.angle / 2), p1 = std::polar(1.0, g.angle / 2);
        for (Eigen::Index i = 0; i < dim; ++i) m.row(i) *= (i & tbit) ? p1 : p0;
        return;
    }
    }
}

namespace detail {

// c * a with the product written out; avoids the NaN-recovery path of
// std::complex multiplication in the inner loop.
inline std::complex<double> mul(std::complex<double> c, std::complex<double> a) {
    return {c.real() * a.real() - c.imag() * a.imag(), c.real() * a.imag() + c.imag() * a.real()};
}

/// Single-vector kernel: visits only the affected amplitude pairs.
inline void apply_gate_vector(std::complex<double>* a, std::size_t dim, const Gate& g) {
    switch (g.kind) {
    case GateKind::GlobalPhase: {
        const auto p = std::polar(1.0, g.angle);
        for (std::size_t i = 0; i < dim; ++i) a[i] = mul(p, a[i]);
        return;
    }
    case GateKind::CNOT: {
        const std::size_t cbit = std::size_t{1} << g.control, tbit = std::size_t{1} << g.target;
        for (std::size_t i = 0; i < dim; ++i)
            if ((i & cbit) && !(i & tbit)) std::swap(a[i], a[i | tbit]);
        return;
    }
    case GateKind::Ry: {
        const std::size_t tbit = std::size_t{1} << g.target;
        const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & tbit) continue;
            const auto a0 = a[i], a1 = a[i | tbit];
            a[i] = c * a0 - s * a1;
            a[i | tbit] = s * a0 + c * a1;
        }
        return;
    }
    case GateKind::Rz: {
        const std::size_t tbit = std::size_t{1} << g.target;
        const auto p0 = std::polar(1.0, -g.angle / 2), p1 = std::polar(1.0, g.angle / 2);
        for (std::size_t i = 0; i < dim; ++i) a[i] = mul((i & tbit) ? p1 : p0, a[i]);
        return;
    }
    }
}

}  // namespace detail

struct StateVector {
    int num_qubits = 1;
    Eigen::VectorXcd amplitudes;

    static StateVector from(const Eigen::VectorXcd& a) {
        const auto n = static_cast<std::uint64_t>(a.size());
        detail::require(n >= 2 && std::has_single_bit(n), "StateVector: size must be a power of two >= 2");
        return {std::countr_zero(n), a};
    }
    double norm() const { return amplitudes.norm(); }
    Eigen::VectorXd probabilities() const { return amplitudes.cwiseAbs2(); }
};

inline StateVector run_circuit(const StateVector& psi, const GateSequence& seq) {
    if (seq.num_qubits() != psi.num_qubits) throw ValidationError("run_circuit: qubit count mismatch");
    StateVector out = psi;
    const auto dim = static_cast<std::size_t>(out.amplitudes.size());
    for (const auto& g : seq.gates()) detail::apply_gate_vector(out.amplitudes.data(), dim, g);
    return out;
}

/// Full unitary of a gate sequence.
inline Eigen::MatrixXcd circuit_unitary(const GateSequence& seq) {
    const Eigen::Index dim = Eigen::Index{1} << seq.num_qubits();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& g : seq.gates()) apply_gate(u, g);
    return u;
}

/// exp(-i H t) from a real eigensystem, t in atomic units.
inline Eigen::MatrixXcd exact_propagator(const EigenSystem& es, double t_au) {
    Eigen::VectorXcd ph(es.size());
    for (Eigen::Index j = 0; j < es.size(); ++j) ph[j] = std::polar(1.0, -es.energies[j] * t_au);
    const Eigen::MatrixXcd x = es.vectors.cast<std::complex<double>>();
    return x * ph.asDiagonal() * x.adjoint();
}

// ---------------------------------------------------------------------------
// Sampling

/// Histogram of computational-basis outcomes.
struct ShotResult {
    int num_qubits = 1;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> counts;

    Eigen::VectorXd frequencies() const {
        Eigen::VectorXd f(static_cast<Eigen::Index>(counts.size()));
        for (std::size_t i = 0; i < counts.size(); ++i)
            f[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / static_cast<double>(shots);
        return f;
    }
};

/// Multinomial draw of `shots` outcomes from |psi|^2 using std::mt19937_64
/// and sequential conditional binomials. Streams are reproducible for a given
/// seed and standard library.
inline ShotResult sample_shots(const StateVector& psi, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw ValidationError("sample_shots: shots must be positive");
    const double nrm = psi.norm();
    if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > 1e-10)
        throw NumericalError("sample_shots: state is not normalised");
    const Eigen::VectorXd p = psi.probabilities() / (nrm * nrm);
    ShotResult r{psi.num_qubits, shots, seed, std::vector<std::uint64_t>(static_cast<std::size_t>(p.size()), 0)};
    std::mt19937_64 rng(seed);
    std::uint64_t left = shots;
    double mass = 1.0;
    for (Eigen::Index i = 0; i < p.size() && left > 0; ++i) {
        if (i == p.size() - 1 || mass <= 0.0) {
            r.counts[static_cast<std::size_t>(i)] = left;
            left = 0;
            break;
        }
        const double q = std::clamp(p[i] / mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(left, q);
        const std::uint64_t k = bin(rng);
        r.counts[static_cast<std::size_t>(i)] = k;
        left -= k;
        mass -= p[i];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Grid densities

enum class Basis { Grid, Mapped };

/// Maps needed to read a mapped-register state on the grid.
struct DensityMaps {
    const GivensBasisMap* givens = nullptr;
    const ParityPartition* partition = nullptr;
};

inline Eigen::VectorXd probability_density(const StateVector& psi, Basis basis,
                                           std::optional<DensityMaps> maps = std::nullopt) {
    if (basis == Basis::Grid) return psi.probabilities();
    if (!maps || !maps->givens || !maps->partition)
        throw ValidationError("probability_density: mapped basis needs the Givens map and parity partition");
    return from_mapped_basis(psi.amplitudes, *maps->givens, *maps->partition).cwiseAbs2();
}

/// Grid density from measured counts. For the mapped basis each Givens pair
/// (i, n-1-i) is fixed by two outcomes, whose summed frequency is the pair
/// population; the split between the two grid points follows `reference`
/// (an exact grid density at the same time).
inline Eigen::VectorXd probability_density(const ShotResult& shots, Basis basis,
                                           std::optional<DensityMaps> maps = std::nullopt,
                                           const Eigen::VectorXd* reference = nullptr) {
    const Eigen::VectorXd f = shots.frequencies();
    if (basis == Basis::Grid) return f;
    if (!maps || !maps->givens || !maps->partition)
        throw ValidationError("probability_density: mapped basis needs the Givens map and parity partition");
    if (!reference) throw ValidationError("probability_density: mapped shots need a reference density");
    const auto& p = *maps->partition;
    const auto n = static_cast<Eigen::Index>(p.dim());
    if (f.size() != n || reference->size() != n) throw ValidationError("probability_density: dimension mismatch");
    Eigen::VectorXd rho(n);
    for (Eigen::Index i = 0; i < n / 2; ++i) {
        const Eigen::Index j = n - 1 - i;
        const double pair = f[p.order[static_cast<std::size_t>(i)]] + f[p.order[static_cast<std::size_t>(j)]];
        const double tot = (*reference)[i] + (*reference)[j];
        const double frac = tot > 0.0 ? (*reference)[i] / tot : 0.5;
        rho[i] = pair * frac;
        rho[j] = pair * (1.0 - frac);
    }
    return rho;
}

}  // namespace nucdyn

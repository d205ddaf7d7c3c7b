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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"

namespace nucdyn {

/// Orthogonal map from the grid basis to symmetric/antisymmetric pair
/// combinations. Row i < 2^{N-1} is (e_i + e_{n-i})/sqrt2, row i >= 2^{N-1}
/// is (e_i - e_{n-i})/sqrt2 with n = 2^N - 1.
struct GivensBasisMap {
    int num_qubits = 1;
    Eigen::MatrixXd matrix;

    std::size_t dim() const { return std::size_t{1} << num_qubits; }
    std::size_t half() const { return dim() / 2; }

    // G x without materialising the product
    template <typename Vec>
    Vec apply(const Vec& x) const {
        const std::size_t n = dim(), h = half();
        Vec y(x.size());
        const double r = std::sqrt(0.5);
        for (std::size_t i = 0; i < h; ++i) {
            const auto a = x[static_cast<Eigen::Index>(i)];
            const auto b = x[static_cast<Eigen::Index>(n - 1 - i)];
            y[static_cast<Eigen::Index>(i)] = r * (a + b);
            y[static_cast<Eigen::Index>(n - 1 - i)] = r * (b - a);
        }
        return y;
    }

    // G^T y
    template <typename Vec>
    Vec apply_transpose(const Vec& y) const {
        const std::size_t n = dim(), h = half();
        Vec x(y.size());
        const double r = std::sqrt(0.5);
        for (std::size_t i = 0; i < h; ++i) {
            const auto p = y[static_cast<Eigen::Index>(i)];
            const auto m = y[static_cast<Eigen::Index>(n - 1 - i)];
            x[static_cast<Eigen::Index>(i)] = r * (p - m);
            x[static_cast<Eigen::Index>(n - 1 - i)] = r * (p + m);
        }
        return x;
    }
};

inline GivensBasisMap givens_map(int num_qubits) {
    detail::require(num_qubits >= 1, "givens_map: need at least one qubit");
    GivensBasisMap g;
    g.num_qubits = num_qubits;
    const auto n = static_cast<Eigen::Index>(g.dim());
    const double r = std::sqrt(0.5);
    g.matrix = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index partner = n - 1 - i;
        g.matrix(i, i) = r;
        g.matrix(i, partner) = i < n / 2 ? r : -r;
    }
    return g;
}

/// Even-Hamming-weight bitstrings in ascending order, then odd ones.
/// `order[i]` is the computational basis index carrying Givens component i.
struct ParityPartition {
    int num_qubits = 1;
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> position;  // inverse of order

    std::size_t dim() const { return order.size(); }
    std::size_t block_size() const { return order.size() / 2; }
    /// Bitstrings of block 0 (even weight) or block 1 (odd weight).
    std::vector<std::uint32_t> block_states(int block) const {
        const auto b = static_cast<std::ptrdiff_t>(block_size());
        return block == 0 ? std::vector<std::uint32_t>(order.begin(), order.begin() + b)
                          : std::vector<std::uint32_t>(order.begin() + b, order.end());
    }
};

inline ParityPartition parity_partition(int num_qubits) {
    detail::require(num_qubits >= 1 && num_qubits <= 30, "parity_partition: qubit count out of range");
    ParityPartition p;
    p.num_qubits = num_qubits;
    const std::uint32_t n = 1u << num_qubits;
    p.order.reserve(n);
    for (int parity = 0; parity < 2; ++parity)
        for (std::uint32_t s = 0; s < n; ++s)
            if ((std::popcount(s) & 1) == parity) p.order.push_back(s);
    p.position.assign(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) p.position[p.order[i]] = i;
    return p;
}

/// H in the Givens basis, split into its two diagonal blocks.
struct BlockHamiltonian {
    Eigen::MatrixXd transformed;  // G H G^T
    Eigen::MatrixXd block_a;      // symmetric combinations
    Eigen::MatrixXd block_b;      // antisymmetric combinations
    double coupling_residual = 0.0;  // Frobenius norm of both off-diagonal blocks
    // max deviation from the Toeplitz closed forms; only meaningful when H = K + diag(V)
    double closed_form_deviation = 0.0;
    double source_norm = 0.0;  // ||H||_F

    Eigen::Index half() const { return block_a.rows(); }
};

namespace detail {

// Closed-form entries of G H G^T for H = K + diag(V) with Toeplitz K.
// Diagonal blocks: K(i,l) + a_i K(i,n-l) + (V_i + V_{n-i})/2 delta_il,
// a_i = +1 in the symmetric block, -1 in the antisymmetric block.
// Off-diagonal block: (V_{n-i} - V_i)/2 at l = n - i, zero elsewhere.
inline double max_closed_form_deviation(const Eigen::MatrixXd& h, const Eigen::MatrixXd& ht) {
    const Eigen::Index dim = h.rows(), n = dim - 1, half = dim / 2;
    // Off-diagonal entries of H are K itself. On the diagonal K_ii = k0 and
    // V_i = H_ii - k0; k0 cancels in every closed form, so take k0 = 0.
    const Eigen::VectorXd v = h.diagonal();
    auto K = [&](Eigen::Index i, Eigen::Index l) { return i == l ? 0.0 : h(i, l); };
    auto V = [&](Eigen::Index i) { return v[i]; };
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index l = 0; l < dim; ++l) {
            const bool ia = i < half, la = l < half;
            double expected;
            if (ia == la) {
                const double alpha = ia ? 1.0 : -1.0;
                expected = K(i, l) + alpha * K(i, n - l) + (i == l ? 0.5 * (V(i) + V(n - i)) : 0.0);
            } else {
                expected = (l == n - i) ? (ia ? 0.5 * (V(n - i) - V(i)) : 0.5 * (V(i) - V(n - i))) : 0.0;
            }
            worst = std::max(worst, std::abs(expected - ht(i, l)));
        }
    }
    return worst;
}

}  // namespace detail

inline BlockHamiltonian block_transform(const Eigen::MatrixXd& h, const GivensBasisMap& g) {
    if (h.rows() != h.cols() || h.rows() != g.matrix.rows())
        throw ValidationError("block_transform: Hamiltonian and Givens map dimensions differ");
    BlockHamiltonian bh;
    bh.transformed = g.matrix * h * g.matrix.transpose();
    const Eigen::Index half = h.rows() / 2;
    bh.block_a = bh.transformed.topLeftCorner(half, half);
    bh.block_b = bh.transformed.bottomRightCorner(half, half);
    const double upper = bh.transformed.topRightCorner(half, half).squaredNorm();
    const double lower = bh.transformed.bottomLeftCorner(half, half).squaredNorm();
    bh.coupling_residual = std::sqrt(upper + lower);
    bh.source_norm = h.norm();
    bh.closed_form_deviation = detail::max_closed_form_deviation(h, bh.transformed);
    return bh;
}

inline BlockHamiltonian block_transform(const NuclearHamiltonian& h, const GivensBasisMap& g) {
    return block_transform(h.matrix, g);
}

/// Grid amplitudes -> computational-basis amplitudes of the mapped register.
template <typename Vec>
Vec to_mapped_basis(const Vec& grid_state, const GivensBasisMap& g, const ParityPartition& p) {
    if (static_cast<std::size_t>(grid_state.size()) != g.dim() || p.dim() != g.dim())
        throw ValidationError("to_mapped_basis: dimension mismatch");
    const Vec givens = g.apply(grid_state);
    Vec out(givens.size());
    for (std::size_t i = 0; i < p.dim(); ++i)
        out[static_cast<Eigen::Index>(p.order[i])] = givens[static_cast<Eigen::Index>(i)];
    return out;
}

template <typename Vec>
Vec from_mapped_basis(const Vec& mapped_state, const GivensBasisMap& g, const ParityPartition& p) {
    if (static_cast<std::size_t>(mapped_state.size()) != g.dim() || p.dim() != g.dim())
        throw ValidationError("from_mapped_basis: dimension mismatch");
    Vec givens(mapped_state.size());
    for (std::size_t i = 0; i < p.dim(); ++i)
        givens[static_cast<Eigen::Index>(i)] = mapped_state[static_cast<Eigen::Index>(p.order[i])];
    return g.apply_transpose(givens);
}

/// P M P^T: a Givens-basis operator expressed on the computational basis.
inline Eigen::MatrixXd permute_to_computational(const Eigen::MatrixXd& givens_op, const ParityPartition& p) {
    const auto n = static_cast<Eigen::Index>(p.dim());
    if (givens_op.rows() != n || givens_op.cols() != n)
        throw ValidationError("permute_to_computational: dimension mismatch");
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index l = 0; l < n; ++l) out(p.order[static_cast<std::size_t>(i)], p.order[static_cast<std::size_t>(l)]) = givens_op(i, l);
    return out;
}

}  // namespace nucdyn

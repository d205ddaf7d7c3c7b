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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nucdyn/error.hpp"
#include "nucdyn/transforms.hpp"

namespace nucdyn {

/// Generalized Ising parameters with B^x = B^y = 0, all in Hartree.
/// Qubit j is bit j of the basis index (least significant bit = qubit 0).
/// Coupling matrices are N x N with only the strict upper triangle in use.
struct IsingParameters {
    int num_qubits = 1;
    double offset = 0.0;
    Eigen::VectorXd b_z;
    Eigen::MatrixXd j_x, j_y, j_z;
    double diagonal_residual = 0.0;
    double offdiagonal_residual = 0.0;

    static IsingParameters zero(int n) {
        IsingParameters p;
        p.num_qubits = n;
        p.b_z = Eigen::VectorXd::Zero(n);
        p.j_x = p.j_y = p.j_z = Eigen::MatrixXd::Zero(n, n);
        return p;
    }

    static std::size_t diagonal_unknowns(int n) { return 1 + n + n * (n - 1) / 2; }
    static std::size_t offdiagonal_unknowns(int n) { return n * (n - 1); }
};

namespace detail {

inline int bit(std::uint32_t s, int j) { return static_cast<int>((s >> j) & 1u); }
inline double zsign(int b) { return b ? -1.0 : 1.0; }

// Minimum-norm least squares; singular values below 1e-12 * sigma_max dropped.
inline Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (a.cols() == 0) return Eigen::VectorXd();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(b);
}

struct DiagonalFit {
    double offset = 0.0;
    Eigen::VectorXd b_z;
    Eigen::MatrixXd j_z;
    double residual = 0.0;
};

inline DiagonalFit fit_diagonal(const std::vector<std::uint32_t>& states, const Eigen::VectorXd& d, int n) {
    const auto rows = static_cast<Eigen::Index>(states.size());
    const auto cols = static_cast<Eigen::Index>(IsingParameters::diagonal_unknowns(n));
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::uint32_t s = states[static_cast<std::size_t>(r)];
        Eigen::Index c = 0;
        a(r, c++) = 1.0;
        for (int j = 0; j < n; ++j) a(r, c++) = zsign(bit(s, j));
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) a(r, c++) = zsign(bit(s, j) ^ bit(s, k));
    }
    const Eigen::VectorXd theta = min_norm_solve(a, d);
    DiagonalFit fit;
    fit.b_z = Eigen::VectorXd::Zero(n);
    fit.j_z = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index c = 0;
    fit.offset = theta[c++];
    for (int j = 0; j < n; ++j) fit.b_z[j] = theta[c++];
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) fit.j_z(j, k) = theta[c++];
    fit.residual = (a * theta - d).norm();
    return fit;
}

struct OffDiagonalFit {
    Eigen::MatrixXd j_x, j_y;
    double residual = 0.0;
};

// One entry M(a, b) of an operator between computational states a != b.
struct Coupling {
    std::uint32_t from, to;
    double value;
};

inline OffDiagonalFit fit_offdiagonal(const std::vector<Coupling>& entries, int n) {
    std::vector<int> pair_index(static_cast<std::size_t>(n * n), -1);
    int pairs = 0;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) pair_index[static_cast<std::size_t>(j * n + k)] = pairs++;

    std::vector<const Coupling*> fitted;
    double unfit_sq = 0.0;
    for (const auto& e : entries) {
        if (std::popcount(e.from ^ e.to) == 2) fitted.push_back(&e);
        else unfit_sq += e.value * e.value;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fitted.size()), 2 * pairs);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(fitted.size()));
    for (std::size_t r = 0; r < fitted.size(); ++r) {
        const auto& e = *fitted[r];
        const std::uint32_t diff = e.from ^ e.to;
        const int j = std::countr_zero(diff);
        const int k = 31 - std::countl_zero(diff);
        const double s = bit(e.from, j) == bit(e.from, k) ? 1.0 : -1.0;
        const int p = pair_index[static_cast<std::size_t>(j * n + k)];
        a(static_cast<Eigen::Index>(r), 2 * p) = 1.0;
        a(static_cast<Eigen::Index>(r), 2 * p + 1) = -s;
        rhs[static_cast<Eigen::Index>(r)] = e.value;
    }
    OffDiagonalFit fit;
    fit.j_x = Eigen::MatrixXd::Zero(n, n);
    fit.j_y = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * pairs);
    if (!fitted.empty()) theta = min_norm_solve(a, rhs);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const int p = pair_index[static_cast<std::size_t>(j * n + k)];
            fit.j_x(j, k) = theta[2 * p];
            fit.j_y(j, k) = theta[2 * p + 1];
        }
    const double misfit_sq = fitted.empty() ? 0.0 : (a * theta - rhs).squaredNorm();
    // each upper-triangle entry stands for itself and its Hermitian partner
    fit.residual = std::sqrt(2.0 * (misfit_sq + unfit_sq));
    return fit;
}

inline void check_symmetric(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() != m.cols()) throw ValidationError(std::string(who) + ": matrix is not square");
    const double tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol)
        throw ValidationError(std::string(who) + ": matrix is not Hermitian");
}

inline std::vector<Coupling> upper_couplings(const Eigen::MatrixXd& m, const std::vector<std::uint32_t>& states) {
    std::vector<Coupling> out;
    const auto size = static_cast<Eigen::Index>(states.size());
    for (Eigen::Index a = 0; a < size; ++a)
        for (Eigen::Index b = a + 1; b < size; ++b)
            out.push_back({states[static_cast<std::size_t>(a)], states[static_cast<std::size_t>(b)], m(a, b)});
    return out;
}

}  // namespace detail

/// Fit {c, B^z, J^z} to the diagonal of one parity block; d[i] belongs to
/// bitstring p.block_states(block)[i].
inline detail::DiagonalFit extract_diagonal_params(const Eigen::VectorXd& d, const ParityPartition& p, int block) {
    detail::require(block == 0 || block == 1, "extract_diagonal_params: block id must be 0 or 1");
    if (d.size() == 0) throw ValidationError("extract_diagonal_params: empty block");
    if (static_cast<std::size_t>(d.size()) != p.block_size())
        throw ValidationError("extract_diagonal_params: diagonal length does not match the block");
    return detail::fit_diagonal(p.block_states(block), d, p.num_qubits);
}

/// Fit {J^x, J^y} to the within-block off-diagonal elements of a block.
inline detail::OffDiagonalFit extract_offdiag_params(const Eigen::MatrixXd& m, const ParityPartition& p, int block) {
    detail::require(block == 0 || block == 1, "extract_offdiag_params: block id must be 0 or 1");
    detail::check_symmetric(m, "extract_offdiag_params");
    if (static_cast<std::size_t>(m.rows()) != p.block_size())
        throw ValidationError("extract_offdiag_params: block size mismatch");
    return detail::fit_offdiagonal(detail::upper_couplings(m, p.block_states(block)), p.num_qubits);
}

/// c I + sum_j B^z_j Z_j + sum_{j<k} (J^x X_j X_k + J^y Y_j Y_k + J^z Z_j Z_k)
inline Eigen::MatrixXd assemble_ising(const IsingParameters& params) {
    const int n = params.num_qubits;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto u = static_cast<std::uint32_t>(s);
        double diag = params.offset;
        for (int j = 0; j < n; ++j) diag += params.b_z[j] * detail::zsign(detail::bit(u, j));
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                diag += params.j_z(j, k) * detail::zsign(detail::bit(u, j) ^ detail::bit(u, k));
                const auto t = static_cast<Eigen::Index>(u ^ (1u << j) ^ (1u << k));
                // <t| Y_j Y_k |s> = -1 when the flipped bits agree, +1 otherwise
                const double s_sign = detail::bit(u, j) == detail::bit(u, k) ? 1.0 : -1.0;
                h(t, s) += params.j_x(j, k) - s_sign * params.j_y(j, k);
            }
        h(s, s) = diag;
    }
    return h;
}

/// Rows/cols of a computational-basis operator restricted to one parity
/// class, in the within-block order of the partition.
inline Eigen::MatrixXd restrict_to_block(const Eigen::MatrixXd& full, const ParityPartition& p, int block) {
    const auto states = p.block_states(block);
    const auto size = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd out(size, size);
    for (Eigen::Index a = 0; a < size; ++a)
        for (Eigen::Index b = 0; b < size; ++b) out(a, b) = full(states[static_cast<std::size_t>(a)], states[static_cast<std::size_t>(b)]);
    return out;
}

struct MapOptions {
    bool force = false;
    double coupling_threshold = 1e-8;  // relative to ||H||_F
    bool global = false;               // one parameter set for both blocks
};

struct MappedSystem {
    int num_qubits = 1;
    bool global = false;
    IsingParameters params[2];
    Eigen::MatrixXd assembled[2];        // H_IT restricted to each block
    double reconstruction_error[2] = {0.0, 0.0};
    double block_norm[2] = {0.0, 0.0};   // ||H~_block||_F
    double block_coupling_residual = 0.0;
    double source_norm = 0.0;

    /// The assembled Ising blocks as one operator on the computational basis.
    Eigen::MatrixXd computational_hamiltonian(const ParityPartition& p) const {
        const auto half = assembled[0].rows();
        Eigen::MatrixXd givens = Eigen::MatrixXd::Zero(2 * half, 2 * half);
        givens.topLeftCorner(half, half) = assembled[0];
        givens.bottomRightCorner(half, half) = assembled[1];
        return permute_to_computational(givens, p);
    }
};

inline MappedSystem map_system(const BlockHamiltonian& bh, const ParityPartition& p, const MapOptions& opt = {}) {
    const int n = p.num_qubits;
    if (static_cast<std::size_t>(bh.transformed.rows()) != p.dim())
        throw ValidationError("map_system: partition and Hamiltonian dimensions differ");
    if (!opt.force && bh.coupling_residual > opt.coupling_threshold * std::max(bh.source_norm, 1e-300) &&
        bh.coupling_residual > 0.0)
        throw PreconditionError("map undefined for broken symmetry: inter-block coupling " +
                                std::to_string(bh.coupling_residual) + " exceeds threshold");
    MappedSystem ms;
    ms.num_qubits = n;
    ms.global = opt.global;
    ms.block_coupling_residual = bh.coupling_residual;
    ms.source_norm = bh.source_norm;
    const Eigen::MatrixXd* blocks[2] = {&bh.block_a, &bh.block_b};

    auto params_from = [n](const detail::DiagonalFit& dfit, const detail::OffDiagonalFit& ofit) {
        IsingParameters prm;
        prm.num_qubits = n;
        prm.offset = dfit.offset;
        prm.b_z = dfit.b_z;
        prm.j_z = dfit.j_z;
        prm.j_x = ofit.j_x;
        prm.j_y = ofit.j_y;
        prm.diagonal_residual = dfit.residual;
        prm.offdiagonal_residual = ofit.residual;
        return prm;
    };

    if (opt.global) {
        std::vector<std::uint32_t> states;
        Eigen::VectorXd d(static_cast<Eigen::Index>(p.dim()));
        std::vector<detail::Coupling> couplings;
        for (int b = 0; b < 2; ++b) {
            const auto bs = p.block_states(b);
            for (std::size_t i = 0; i < bs.size(); ++i) d[static_cast<Eigen::Index>(states.size() + i)] = (*blocks[b])(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            states.insert(states.end(), bs.begin(), bs.end());
            const auto cs = detail::upper_couplings(*blocks[b], bs);
            couplings.insert(couplings.end(), cs.begin(), cs.end());
        }
        const auto prm = params_from(detail::fit_diagonal(states, d, n), detail::fit_offdiagonal(couplings, n));
        ms.params[0] = ms.params[1] = prm;
    } else {
        for (int b = 0; b < 2; ++b)
            ms.params[b] = params_from(extract_diagonal_params(blocks[b]->diagonal(), p, b),
                                       extract_offdiag_params(*blocks[b], p, b));
    }
    for (int b = 0; b < 2; ++b) {
        ms.assembled[b] = restrict_to_block(assemble_ising(ms.params[b]), p, b);
        ms.reconstruction_error[b] = (*blocks[b] - ms.assembled[b]).norm();
        ms.block_norm[b] = blocks[b]->norm();
    }
    return ms;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const IsingParameters& p) {
    auto upper = [&](const Eigen::MatrixXd& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int j = 0; j < p.num_qubits; ++j) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < p.num_qubits; ++k) row.push_back(k > j ? m(j, k) : 0.0);
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json bz = nlohmann::json::array();
    for (int j = 0; j < p.num_qubits; ++j) bz.push_back(p.b_z[j]);
    return {{"num_qubits", p.num_qubits},
            {"units", "hartree"},
            {"offset", p.offset},
            {"b_z", bz},
            {"j_x", upper(p.j_x)},
            {"j_y", upper(p.j_y)},
            {"j_z", upper(p.j_z)},
            {"residuals", {{"diagonal", p.diagonal_residual}, {"off_diagonal", p.offdiagonal_residual}}}};
}

inline IsingParameters ising_from_json(const nlohmann::json& j) {
    const int n = j.at("num_qubits").get<int>();
    IsingParameters p = IsingParameters::zero(n);
    p.offset = j.at("offset").get<double>();
    for (int a = 0; a < n; ++a) p.b_z[a] = j.at("b_z").at(static_cast<std::size_t>(a)).get<double>();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            p.j_x(a, b) = j.at("j_x").at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
            p.j_y(a, b) = j.at("j_y").at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
            p.j_z(a, b) = j.at("j_z").at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
        }
    p.diagonal_residual = j.at("residuals").at("diagonal").get<double>();
    p.offdiagonal_residual = j.at("residuals").at("off_diagonal").get<double>();
    return p;
}

inline nlohmann::json to_json(const MappedSystem& ms) {
    nlohmann::json blocks = nlohmann::json::array();
    for (int b = 0; b < 2; ++b) {
        auto j = to_json(ms.params[b]);
        j["block"] = b;
        j["parity"] = b == 0 ? "even" : "odd";
        j["reconstruction_error"] = ms.reconstruction_error[b];
        j["block_norm"] = ms.block_norm[b];
        blocks.push_back(j);
    }
    return {{"num_qubits", ms.num_qubits},
            {"mode", ms.global ? "global" : "per-block"},
            {"block_coupling_residual", ms.block_coupling_residual},
            {"hamiltonian_norm", ms.source_norm},
            {"blocks", blocks}};
}

}  // namespace nucdyn

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
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nucdyn/error.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn {

using cplx = std::complex<double>;

enum class GateKind { Ry, Rz, CNOT, GlobalPhase };

inline const char* gate_name(GateKind k) {
    switch (k) {
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::CNOT: return "cx";
    case GateKind::GlobalPhase: return "gphase";
    }
    return "?";
}

/// Elementary gate. Ry(t) = exp(-i t Y/2), Rz(t) = exp(-i t Z/2),
/// GlobalPhase(p) = exp(i p). Qubit q acts on bit q of the basis index.
struct Gate {
    GateKind kind = GateKind::GlobalPhase;
    int target = -1;
    int control = -1;
    double angle = 0.0;

    static Gate ry(int q, double theta) { return {GateKind::Ry, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::Rz, q, -1, theta}; }
    static Gate cnot(int c, int t) { return {GateKind::CNOT, t, c, 0.0}; }
    static Gate phase(double phi) { return {GateKind::GlobalPhase, -1, -1, phi}; }

    bool operator==(const Gate&) const = default;
};

/// Time-ordered gate list: gates()[0] acts first.
class GateSequence {
public:
    explicit GateSequence(int num_qubits = 1) : num_qubits_(num_qubits) {
        detail::require(num_qubits >= 1, "GateSequence: need at least one qubit");
    }

    int num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    std::size_t count(GateKind k) const { return counts_[static_cast<std::size_t>(k)]; }

    void push(const Gate& g) {
        validate(g);
        gates_.push_back(g);
        ++counts_[static_cast<std::size_t>(g.kind)];
    }
    void append(const GateSequence& other) {
        detail::require(other.num_qubits_ <= num_qubits_, "GateSequence: appended sequence is wider");
        gates_.reserve(gates_.size() + other.gates_.size());
        for (const auto& g : other.gates_) push(g);
    }
    void reserve(std::size_t n) { gates_.reserve(n); }

    /// Sum of all GlobalPhase angles.
    double total_phase() const {
        double p = 0.0;
        for (const auto& g : gates_)
            if (g.kind == GateKind::GlobalPhase) p += g.angle;
        return p;
    }

    /// Copy without GlobalPhase gates.
    GateSequence without_phases() const {
        GateSequence out(num_qubits_);
        for (const auto& g : gates_)
            if (g.kind != GateKind::GlobalPhase) out.push(g);
        return out;
    }

    bool counts_consistent() const {
        std::array<std::size_t, 4> c{};
        for (const auto& g : gates_) ++c[static_cast<std::size_t>(g.kind)];
        return c == counts_;
    }

private:
    void validate(const Gate& g) const {
        if (!std::isfinite(g.angle)) throw ValidationError("gate angle is not finite");
        auto in_range = [&](int q) { return q >= 0 && q < num_qubits_; };
        switch (g.kind) {
        case GateKind::GlobalPhase: return;
        case GateKind::CNOT:
            if (!in_range(g.control) || !in_range(g.target) || g.control == g.target)
                throw ValidationError("cnot: invalid control/target pair");
            return;
        default:
            if (!in_range(g.target)) throw ValidationError("rotation: qubit index out of range");
        }
    }

    int num_qubits_;
    std::vector<Gate> gates_;
    std::array<std::size_t, 4> counts_{};
};

// ---------------------------------------------------------------------------
// Gate counts

/// CNOTs emitted by the decomposition: 3/4 4^n - 3/2 2^n.
constexpr std::uint64_t cnot_count(int n) {
    if (n < 1) return 0;
    const std::uint64_t p4 = std::uint64_t{1} << (2 * (n - 1));
    const std::uint64_t p2 = std::uint64_t{1} << (n - 1);
    return 3 * p4 - 3 * p2;
}

/// Theoretical lower bound (4^n - 3n - 1)/4 on the CNOT count of a generic n-qubit unitary.
inline double cnot_lower_bound(int n) {
    return (std::ldexp(1.0, 2 * n) - 3.0 * n - 1.0) / 4.0;
}

// ---------------------------------------------------------------------------
// Unitarity helpers

inline double unitarity_defect(const Eigen::MatrixXcd& u) {
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols())).norm();
}

inline void require_unitary(const Eigen::MatrixXcd& u, const char* who, double tol = 1e-10) {
    if (u.rows() != u.cols()) throw ValidationError(std::string(who) + ": matrix is not square");
    if (!(unitarity_defect(u) <= tol)) throw ValidationError(std::string(who) + ": matrix is not unitary");
}

/// Nearest unitary (polar factor).
inline Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

/// Polar factor of a matrix already unitary to round-off: Newton-Schulz
/// steps, falling back to the SVD when the input is far from unitary.
inline Eigen::MatrixXcd reunitarize(const Eigen::MatrixXcd& a) {
    const auto id = Eigen::MatrixXcd::Identity(a.cols(), a.cols());
    Eigen::MatrixXcd x = a;
    for (int it = 0; it < 3; ++it) {
        const Eigen::MatrixXcd e = id - x.adjoint() * x;
        const double defect = e.norm();
        if (defect > 1e-2) return nearest_unitary(a);
        if (defect < 1e-15) break;
        x += 0.5 * x * e;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Cosine-sine decomposition

/// U = (L0 + L1) [[C, -S], [S, C]] (R0 + R1) with C = diag(cos a), S = diag(sin a).
struct CsdResult {
    Eigen::MatrixXcd l0, l1, r0, r1;
    Eigen::VectorXd angles;  // ascending, in [0, pi/2]

    Eigen::MatrixXcd reassemble() const {
        const Eigen::Index m = angles.size();
        Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(2 * m, 2 * m), r = l, cs = l;
        l.topLeftCorner(m, m) = l0;
        l.bottomRightCorner(m, m) = l1;
        r.topLeftCorner(m, m) = r0;
        r.bottomRightCorner(m, m) = r1;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double c = std::cos(angles[i]), s = std::sin(angles[i]);
            cs(i, i) = c;
            cs(m + i, m + i) = c;
            cs(i, m + i) = -s;
            cs(m + i, i) = s;
        }
        return l * cs * r;
    }
};

namespace detail {

inline CsdResult csd_unchecked(const Eigen::MatrixXcd& u) {
    const Eigen::Index m = u.rows() / 2;
    const Eigen::MatrixXcd u00 = u.topLeftCorner(m, m), u01 = u.topRightCorner(m, m);
    const Eigen::MatrixXcd u10 = u.bottomLeftCorner(m, m), u11 = u.bottomRightCorner(m, m);

    // U00 = L0 C R0; singular values come out descending, so angles ascend.
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(u00, Eigen::ComputeFullU | Eigen::ComputeFullV);
    CsdResult r;
    r.l0 = svd.matrixU();
    r.r0 = svd.matrixV().adjoint();
    const Eigen::VectorXd c = svd.singularValues().cwiseMin(1.0);

    // U10 R0^H = L1 S has orthogonal columns with norms sin(a_i). Pivoted QR
    // takes the large columns first so the small ones cannot pollute them.
    const Eigen::MatrixXcd y = u10 * svd.matrixV();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(y);
    const Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd t = qr.matrixQR().template triangularView<Eigen::Upper>();
    const auto& perm = qr.colsPermutation().indices();
    r.l1.resize(m, m);
    Eigen::VectorXd s(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index col = perm[k];
        const cplx d = t(k, k);
        const double mag = std::abs(d);
        const cplx phase = mag > 0.0 ? d / mag : cplx(1.0, 0.0);
        r.l1.col(col) = q.col(k) * phase;
        s[col] = mag;
    }

    r.angles.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) r.angles[i] = std::atan2(s[i], c[i]);

    // [L0^H U01; L1^H U11] = [-S R1; C R1] and C^2 + S^2 = I.
    Eigen::MatrixXcd r1(m, m);
    const Eigen::MatrixXcd top = r.l0.adjoint() * u01, bottom = r.l1.adjoint() * u11;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ci = std::cos(r.angles[i]), si = std::sin(r.angles[i]);
        r1.row(i) = -si * top.row(i) + ci * bottom.row(i);
    }
    r.r1 = reunitarize(r1);
    return r;
}

}  // namespace detail

inline CsdResult cosine_sine_decompose(const Eigen::MatrixXcd& u) {
    require_unitary(u, "cosine_sine_decompose");
    if (u.rows() < 2 || u.rows() % 2 != 0)
        throw ValidationError("cosine_sine_decompose: dimension must be even");
    return detail::csd_unchecked(u);
}

// ---------------------------------------------------------------------------
// Demultiplexing

/// L0 + L1 = (V + V)(D + D^H)(W + W), D = diag(exp(i delta)).
struct DemuxResult {
    Eigen::MatrixXcd v, w;
    Eigen::VectorXd phases;  // delta_j, ascending

    Eigen::MatrixXcd diag() const {
        Eigen::VectorXcd d(phases.size());
        for (Eigen::Index j = 0; j < phases.size(); ++j) d[j] = std::polar(1.0, phases[j]);
        return d.asDiagonal();
    }
    Eigen::MatrixXcd reassemble() const {
        const Eigen::Index m = phases.size();
        const Eigen::MatrixXcd d = diag();
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
        out.topLeftCorner(m, m) = v * d * w;
        out.bottomRightCorner(m, m) = v * d.adjoint() * w;
        return out;
    }
};

namespace detail {

inline DemuxResult demux_unchecked(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& l1) {
    const Eigen::Index m = l0.rows();
    // L0 L1^H is normal, so its Schur form is diagonal and the Schur vectors
    // give an orthonormal eigenbasis even for repeated eigenvalues.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(l0 * l1.adjoint());
    if (schur.info() != Eigen::Success) throw NumericalError("demultiplex: Schur decomposition failed");
    const Eigen::MatrixXcd& z = schur.matrixU();
    const Eigen::MatrixXcd& tri = schur.matrixT();
    std::vector<double> delta(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) delta[static_cast<std::size_t>(j)] = std::arg(tri(j, j)) / 2.0;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return delta[static_cast<std::size_t>(a)] < delta[static_cast<std::size_t>(b)];
    });
    DemuxResult r;
    r.v.resize(m, m);
    r.phases.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        r.v.col(j) = z.col(order[static_cast<std::size_t>(j)]);
        r.phases[j] = delta[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
    }
    r.w = r.diag() * r.v.adjoint() * l1;
    return r;
}

}  // namespace detail

inline DemuxResult demultiplex(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& l1) {
    require_unitary(l0, "demultiplex");
    require_unitary(l1, "demultiplex");
    if (l0.rows() != l1.rows()) throw ValidationError("demultiplex: block sizes differ");
    return detail::demux_unchecked(l0, l1);
}

// ---------------------------------------------------------------------------
// Uniformly controlled rotations

enum class Axis { Y, Z };

/// In-place unnormalised Walsh-Hadamard transform.
inline void walsh_hadamard(std::vector<double>& a) {
    for (std::size_t h = 1; h < a.size(); h <<= 1)
        for (std::size_t i = 0; i < a.size(); i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
}

/// Rotation by angles[s] on `target` when the controls read s (bit b of s is
/// qubit controls[b]). Emits 2^k rotations, each followed by a CNOT whose
/// control is the bit that flips between consecutive Gray codes.
inline GateSequence multiplexed_rotation_to_gates(int num_qubits, Axis axis, const std::vector<double>& angles,
                                                  int target, const std::vector<int>& controls) {
    const std::size_t k = controls.size();
    if (angles.size() != (std::size_t{1} << k))
        throw ValidationError("multiplexed rotation: need 2^k angles for k controls");
    for (std::size_t a = 0; a < k; ++a) {
        if (controls[a] == target) throw ValidationError("multiplexed rotation: control overlaps target");
        for (std::size_t b = a + 1; b < k; ++b)
            if (controls[a] == controls[b]) throw ValidationError("multiplexed rotation: repeated control");
    }
    GateSequence out(num_qubits);
    auto rot = [&](double theta) { return axis == Axis::Y ? Gate::ry(target, theta) : Gate::rz(target, theta); };
    if (k == 0) {
        out.push(rot(angles[0]));
        return out;
    }
    // theta_j = (1/2^k) sum_s (-1)^{popcount(s & g_j)} angles[s], g_j = j ^ (j >> 1)
    std::vector<double> w = angles;
    walsh_hadamard(w);
    const std::size_t count = angles.size();
    out.reserve(2 * count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t g = j ^ (j >> 1);
        const std::size_t next = (j + 1) % count;
        const std::size_t g_next = next ^ (next >> 1);
        const int flip = std::countr_zero(static_cast<std::uint64_t>(g ^ g_next));
        out.push(rot(w[g] / static_cast<double>(count)));
        out.push(Gate::cnot(controls[static_cast<std::size_t>(flip)], target));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single-qubit ZYZ

/// U = exp(i phase) Rz(beta) Ry(gamma) Rz(delta); gamma in [0, pi],
/// beta in (-pi, pi], delta = 0 when gamma is 0 or pi.
struct ZyzAngles {
    double phase = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
};

namespace detail {

inline double wrap_pi(double a) {
    a = std::remainder(a, 2.0 * units::kPi);  // [-pi, pi]
    if (a <= -units::kPi) a += 2.0 * units::kPi;
    return a;
}

inline ZyzAngles zyz_unchecked(const Eigen::Matrix2cd& u) {
    ZyzAngles z;
    z.phase = std::arg(u.determinant()) / 2.0;
    const Eigen::Matrix2cd v = u * std::polar(1.0, -z.phase);  // det v = 1
    const double c = std::abs(v(1, 1)), s = std::abs(v(1, 0));
    z.gamma = 2.0 * std::atan2(s, c);
    constexpr double degenerate = 1e-14;
    if (s <= degenerate) {
        z.beta = 2.0 * std::arg(v(1, 1));
        z.delta = 0.0;
    } else if (c <= degenerate) {
        z.beta = 2.0 * std::arg(v(1, 0));
        z.delta = 0.0;
    } else {
        const double sum = std::arg(v(1, 1));   // (beta + delta)/2
        const double diff = std::arg(v(1, 0));  // (beta - delta)/2
        z.beta = sum + diff;
        z.delta = sum - diff;
    }
    // Rz(beta + 2pi) = -Rz(beta): fold beta into (-pi, pi] and move the sign
    // into the phase.
    const double folded = wrap_pi(z.beta);
    const double turns = std::round((z.beta - folded) / (2.0 * units::kPi));
    z.beta = folded;
    if (std::fmod(std::abs(turns), 2.0) == 1.0) z.phase += units::kPi;
    z.phase = wrap_pi(z.phase);
    return z;
}

}  // namespace detail

inline ZyzAngles zyz(const Eigen::Matrix2cd& u) {
    require_unitary(u, "zyz", 1e-10);
    return detail::zyz_unchecked(u);
}

// ---------------------------------------------------------------------------
// Quantum Shannon decomposition

namespace detail {

inline std::vector<int> lower_qubits(int m) {
    std::vector<int> c(static_cast<std::size_t>(m));
    std::iota(c.begin(), c.end(), 0);
    return c;
}

inline void qsd_into(const Eigen::MatrixXcd& u, int m, GateSequence& out);

// (V + V)(D + D^H)(W + W) on qubits [0, m): top qubit m-1 is the multiplexor target.
inline void emit_block_diagonal(const Eigen::MatrixXcd& b0, const Eigen::MatrixXcd& b1, int m, GateSequence& out) {
    const DemuxResult dm = demux_unchecked(b0, b1);
    qsd_into(dm.w, m - 1, out);
    // top qubit |0> picks up exp(i delta), |1> exp(-i delta): Rz(-2 delta)
    std::vector<double> angles(static_cast<std::size_t>(dm.phases.size()));
    for (std::size_t j = 0; j < angles.size(); ++j) angles[j] = -2.0 * dm.phases[static_cast<Eigen::Index>(j)];
    out.append(multiplexed_rotation_to_gates(out.num_qubits(), Axis::Z, angles, m - 1, lower_qubits(m - 1)));
    qsd_into(dm.v, m - 1, out);
}

inline void qsd_into(const Eigen::MatrixXcd& u, int m, GateSequence& out) {
    if (m == 1) {
        const ZyzAngles z = zyz_unchecked(u);
        out.push(Gate::rz(0, z.delta));
        out.push(Gate::ry(0, z.gamma));
        out.push(Gate::rz(0, z.beta));
        out.push(Gate::phase(z.phase));
        return;
    }
    const CsdResult cs = csd_unchecked(u);
    emit_block_diagonal(cs.r0, cs.r1, m, out);
    std::vector<double> angles(static_cast<std::size_t>(cs.angles.size()));
    for (std::size_t j = 0; j < angles.size(); ++j) angles[j] = 2.0 * cs.angles[static_cast<Eigen::Index>(j)];
    out.append(multiplexed_rotation_to_gates(out.num_qubits(), Axis::Y, angles, m - 1, lower_qubits(m - 1)));
    emit_block_diagonal(cs.l0, cs.l1, m, out);
}

}  // namespace detail

inline constexpr int kMaxCompileQubits = 12;

/// Compile a 2^n x 2^n unitary into {Ry, Rz, CNOT, GlobalPhase}. The gate
/// pattern depends only on n; CNOT count is cnot_count(n).
inline GateSequence qsd_compile(const Eigen::MatrixXcd& u) {
    if (u.rows() != u.cols() || u.rows() < 2 || !std::has_single_bit(static_cast<std::uint64_t>(u.rows())))
        throw ValidationError("qsd_compile: dimension must be a power of two >= 2");
    const int n = std::countr_zero(static_cast<std::uint64_t>(u.rows()));
    if (n > kMaxCompileQubits) throw ValidationError("qsd_compile: at most 12 qubits supported");
    require_unitary(u, "qsd_compile");
    GateSequence out(n);
    detail::qsd_into(u, n, out);
    return out;
}

}  // namespace nucdyn

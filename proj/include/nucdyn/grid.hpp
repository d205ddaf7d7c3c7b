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
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nucdyn/error.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn {

/// Uniform one-dimensional grid with 2^N points, symmetric about its centre.
struct GridSpec {
    int num_qubits = 1;
    double length_angstrom = 1.0;
    double center_angstrom = 0.0;
    double mass = units::kProtonMass;  // electron masses

    std::size_t num_points() const { return std::size_t{1} << num_qubits; }
    // index of the mirror partner x_{n-i}
    std::size_t mirror(std::size_t i) const { return num_points() - 1 - i; }
    double spacing_angstrom() const {
        return length_angstrom / static_cast<double>(num_points() - 1);
    }
    double spacing_bohr() const { return units::angstrom_to_bohr(spacing_angstrom()); }
    double point_angstrom(std::size_t i) const {
        return center_angstrom - 0.5 * length_angstrom +
               static_cast<double>(i) * spacing_angstrom();
    }
    Eigen::VectorXd points_angstrom() const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(num_points()));
        for (std::size_t i = 0; i < num_points(); ++i) x[static_cast<Eigen::Index>(i)] = point_angstrom(i);
        return x;
    }
};

inline constexpr int kMaxGridQubits = 12;

inline GridSpec build_grid(int num_qubits, double length_angstrom, double center_angstrom,
                           double mass) {
    detail::require(num_qubits >= 1 && num_qubits <= kMaxGridQubits,
                    "grid: qubit count must lie in [1, 12], got " + std::to_string(num_qubits));
    detail::require(std::isfinite(length_angstrom) && length_angstrom > 0.0,
                    "grid: length must be positive");
    detail::require(std::isfinite(mass) && mass > 0.0, "grid: mass must be positive");
    detail::require(std::isfinite(center_angstrom), "grid: centre must be finite");
    return GridSpec{num_qubits, length_angstrom, center_angstrom, mass};
}

// ---------------------------------------------------------------------------
// Potential surfaces

/// Closed-form potentials in the displacement u = x - x_c (angstrom),
/// energies in kcal/mol.
struct AnalyticPotential {
    enum class Kind { DoubleWell, Harmonic, Polynomial };

    Kind kind = Kind::DoubleWell;
    // DoubleWell: {a, b} for a*u^4 - b*u^2; Harmonic: {k} for k*u^2/2;
    // Polynomial: c_0 + c_1 u + c_2 u^2 + ...
    std::vector<double> coefficients;

    static AnalyticPotential double_well(double a, double b) {
        return {Kind::DoubleWell, {a, b}};
    }
    static AnalyticPotential harmonic(double k) { return {Kind::Harmonic, {k}}; }
    static AnalyticPotential polynomial(std::vector<double> c) {
        return {Kind::Polynomial, std::move(c)};
    }
    /// Quartic double well with minima at +-minimum_offset and the given
    /// barrier height above the minima.
    static AnalyticPotential double_well_from_barrier(double barrier_kcal,
                                                      double minimum_offset_angstrom) {
        const double u2 = minimum_offset_angstrom * minimum_offset_angstrom;
        const double a = barrier_kcal / (u2 * u2);
        return double_well(a, 2.0 * a * u2);
    }

    double evaluate_kcal(double u) const {
        switch (kind) {
        case Kind::DoubleWell: {
            const double u2 = u * u;
            return coefficients.at(0) * u2 * u2 - coefficients.at(1) * u2;
        }
        case Kind::Harmonic:
            return 0.5 * coefficients.at(0) * u * u;
        case Kind::Polynomial: {
            double acc = 0.0;
            for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + *it;
            return acc;
        }
        }
        return 0.0;
    }
};

/// Low-barrier symmetric double well used as the stand-in surface: minima at
/// +-0.12 angstrom, 1 kcal/mol barrier. Ground state sits above the barrier.
inline AnalyticPotential builtin_double_well() {
    return AnalyticPotential::double_well_from_barrier(1.0, 0.12);
}

/// Tabulated surface; x strictly increasing.
struct TabulatedPotential {
    std::vector<double> x_angstrom;
    std::vector<double> energy_hartree;
};

inline TabulatedPotential read_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("potential file not readable: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("potential file is empty: " + path);
    auto trim = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
                s.end());
        return s;
    };
    if (trim(line) != "x_angstrom,energy_hartree")
        throw ValidationError(path + ": expected header 'x_angstrom,energy_hartree'");
    TabulatedPotential table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            table.x_angstrom.push_back(std::stod(a));
            table.energy_hartree.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    if (table.x_angstrom.size() < 2) throw ValidationError(path + ": need at least two rows");
    for (std::size_t i = 1; i < table.x_angstrom.size(); ++i)
        if (!(table.x_angstrom[i] > table.x_angstrom[i - 1]))
            throw ValidationError(path + ": x_angstrom must be strictly increasing");
    return table;
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
/// the Fritsch-Butland harmonic mean). No overshoot between data points.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        detail::require(n >= 2 && y_.size() == n, "interpolation needs >= 2 matching points");
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) continue;
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double operator()(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        k = std::min(k, x_.size() - 2);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] +
               (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * d_[k + 1];
    }

private:
    static double end_slope(double h0, double h1, double del0, double del1) {
        double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) return 0.0;
        if (del0 * del1 < 0.0 && std::abs(d) > std::abs(3 * del0)) return 3 * del0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

inline constexpr double kSymmetryTolerance = 1e-10;  // Hartree

struct PotentialSurface {
    enum class Source { Tabulated, Analytic };

    Eigen::VectorXd values;  // Hartree, one per grid point
    Source source = Source::Analytic;
    bool symmetric = false;

    /// max_i |V_i - V_{n-i}|
    double asymmetry() const {
        const Eigen::Index n = values.size();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(values[i] - values[n - 1 - i]));
        return worst;
    }
};

using PotentialSource = std::variant<AnalyticPotential, TabulatedPotential>;

inline PotentialSurface make_surface(Eigen::VectorXd values, PotentialSurface::Source source) {
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw ValidationError("potential: non-finite value at grid index " + std::to_string(i));
    PotentialSurface s{std::move(values), source, false};
    s.symmetric = s.asymmetry() <= kSymmetryTolerance;
    return s;
}

inline PotentialSurface eval_potential(const GridSpec& grid, const PotentialSource& source) {
    const std::size_t n = grid.num_points();
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    if (const auto* model = std::get_if<AnalyticPotential>(&source)) {
        for (std::size_t i = 0; i < n; ++i) {
            // displacement built from the index so mirror points are exact negatives
            const double u = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) *
                             grid.spacing_angstrom();
            v[static_cast<Eigen::Index>(i)] = units::kcal_to_hartree(model->evaluate_kcal(u));
        }
        return make_surface(std::move(v), PotentialSurface::Source::Analytic);
    }
    const auto& table = std::get<TabulatedPotential>(source);
    const double lo = grid.point_angstrom(0), hi = grid.point_angstrom(n - 1);
    const double slack = 1e-9 * grid.length_angstrom;
    if (table.x_angstrom.front() > lo + slack || table.x_angstrom.back() < hi - slack)
        throw ValidationError("potential: tabulated domain does not cover the grid");
    const MonotoneCubic interp(table.x_angstrom, table.energy_hartree);
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = interp(grid.point_angstrom(i));
    return make_surface(std::move(v), PotentialSurface::Source::Tabulated);
}

// ---------------------------------------------------------------------------
// DAF kinetic energy

struct DafParams {
    int order = 20;            // M_DAF, even
    double sigma_ratio = 1.5;  // sigma / dx

    void validate() const {
        detail::require(order >= 0 && order % 2 == 0, "daf: order must be a non-negative even integer");
        detail::require(std::isfinite(sigma_ratio) && sigma_ratio > 0.0, "daf: sigma must be positive");
    }
};

/// Continuous DAF kernel K(|x - x'|) for the kinetic operator, atomic units.
///   K(d) = -1/(4 m s^3 sqrt(2 pi)) exp(-d^2/2s^2) sum_q (-1/4)^q / q! H_{2q+2}(d / (sqrt2 s))
inline double daf_kernel(double distance_bohr, double mass, int order, double sigma_bohr) {
    const double y = distance_bohr / (std::sqrt(2.0) * sigma_bohr);
    const double gauss = std::exp(-y * y);
    if (gauss == 0.0) return 0.0;
    // Physicists' Hermite polynomials by three-term recurrence.
    const int top = order + 2;
    double h_prev = 1.0, h = 2.0 * y;  // H_0, H_1
    double sum = 0.0, coeff = 1.0;     // coeff = (-1/4)^q / q!
    for (int k = 1; k < top; ++k) {
        const double next = 2.0 * y * h - 2.0 * k * h_prev;
        h_prev = h;
        h = next;  // H_{k+1}
        const int deg = k + 1;
        if (deg % 2 == 0) {
            const int q = (deg - 2) / 2;
            if (q > 0) coeff *= -0.25 / q;
            sum += coeff * h;
        }
    }
    const double pref = -1.0 / (4.0 * mass * sigma_bohr * sigma_bohr * sigma_bohr * std::sqrt(2.0 * units::kPi));
    return pref * gauss * sum;
}

struct KineticOperator {
    Eigen::MatrixXd matrix;        // Hartree
    std::vector<double> profile;   // profile[d] = K_{i,i+d}
    std::size_t bandwidth = 0;     // largest d with non-negligible profile[d]
};

/// Grid representation K_ij = dx * K(|x_i - x_j|) of the DAF kernel (the dx
/// is the quadrature weight of the integral operator on the uniform grid).
inline KineticOperator daf_kinetic(const GridSpec& grid, const DafParams& p) {
    p.validate();
    const std::size_t n = grid.num_points();
    const double dx = grid.spacing_bohr();
    const double sigma = p.sigma_ratio * dx;
    KineticOperator k;
    k.profile.resize(n);
    for (std::size_t d = 0; d < n; ++d)
        k.profile[d] = dx * daf_kernel(static_cast<double>(d) * dx, grid.mass, p.order, sigma);
    const double scale = std::abs(k.profile[0]);
    for (std::size_t d = 0; d < n; ++d)
        if (std::abs(k.profile[d]) > 1e-16 * scale) k.bandwidth = d;
    k.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                k.profile[i > j ? i - j : j - i];
    return k;
}

// ---------------------------------------------------------------------------
// Hamiltonian and spectrum

struct NuclearHamiltonian {
    Eigen::MatrixXd matrix;  // Hartree, real symmetric
    GridSpec grid;
    std::size_t kinetic_bandwidth = 0;
    bool banded = false;

    Eigen::Index dim() const { return matrix.rows(); }
};

inline NuclearHamiltonian assemble_hamiltonian(const GridSpec& grid, const KineticOperator& kinetic,
                                               const PotentialSurface& potential) {
    const auto n = static_cast<Eigen::Index>(grid.num_points());
    if (kinetic.matrix.rows() != n || kinetic.matrix.cols() != n || potential.values.size() != n)
        throw ValidationError("hamiltonian: kinetic/potential dimensions do not match the grid");
    NuclearHamiltonian h;
    h.matrix = kinetic.matrix;
    h.matrix.diagonal() += potential.values;
    h.grid = grid;
    h.kinetic_bandwidth = kinetic.bandwidth;
    h.banded = kinetic.bandwidth + 1 < grid.num_points();
    return h;
}

/// Energies ascending; eigenvector columns orthonormal with their first
/// component above 1e-12 in magnitude made positive.
struct EigenSystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;

    Eigen::Index size() const { return energies.size(); }
};

inline EigenSystem eigensolve(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw ValidationError("eigensolve: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolve: did not converge");
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < es.vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < es.vectors.rows(); ++i) {
            const double v = es.vectors(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0) es.vectors.col(j) *= -1.0;
                break;
            }
        }
    }
    return es;
}

inline EigenSystem eigensolve(const NuclearHamiltonian& h) { return eigensolve(h.matrix); }

}  // namespace nucdyn

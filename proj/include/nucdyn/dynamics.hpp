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
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/ising.hpp"
#include "nucdyn/qsd.hpp"
#include "nucdyn/sim.hpp"
#include "nucdyn/transforms.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn {

// ---------------------------------------------------------------------------
// Initial states

struct WavepacketSpec {
    enum class Kind { Delta, Gaussian, Thermal };
    // Thermal amplitudes: exp(-E_j/kT) (Literal) or exp(-E_j/2kT) (Boltzmann)
    enum class ThermalWeights { Literal, Boltzmann };

    Kind kind = Kind::Gaussian;
    std::size_t donor_index = 0;
    double mu_angstrom = 0.0;     // grid coordinate, same frame as point_angstrom
    double sigma_angstrom = 0.1;
    double temperature_kelvin = 300.0;
    ThermalWeights weights = ThermalWeights::Literal;

    static WavepacketSpec delta(std::size_t index = 0) {
        WavepacketSpec s;
        s.kind = Kind::Delta;
        s.donor_index = index;
        return s;
    }
    static WavepacketSpec gaussian(double mu, double sigma) {
        WavepacketSpec s;
        s.kind = Kind::Gaussian;
        s.mu_angstrom = mu;
        s.sigma_angstrom = sigma;
        return s;
    }
    static WavepacketSpec thermal(double kelvin, ThermalWeights w = ThermalWeights::Literal) {
        WavepacketSpec s;
        s.kind = Kind::Thermal;
        s.temperature_kelvin = kelvin;
        s.weights = w;
        return s;
    }
};

/// Grid-basis initial state, normalised.
inline Eigen::VectorXcd initial_wavepacket(const WavepacketSpec& spec, const GridSpec& grid,
                                           const EigenSystem* eig = nullptr) {
    const auto n = static_cast<Eigen::Index>(grid.num_points());
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    switch (spec.kind) {
    case WavepacketSpec::Kind::Delta:
        if (spec.donor_index >= grid.num_points()) throw ValidationError("wavepacket: donor index outside the grid");
        psi[static_cast<Eigen::Index>(spec.donor_index)] = 1.0;
        break;
    case WavepacketSpec::Kind::Gaussian:
        if (!(spec.sigma_angstrom > 0.0) || !std::isfinite(spec.sigma_angstrom))
            throw ValidationError("wavepacket: sigma must be positive");
        if (!std::isfinite(spec.mu_angstrom)) throw ValidationError("wavepacket: mu must be finite");
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (grid.point_angstrom(static_cast<std::size_t>(i)) - spec.mu_angstrom) / spec.sigma_angstrom;
            psi[i] = std::exp(-0.5 * d * d);
        }
        break;
    case WavepacketSpec::Kind::Thermal: {
        if (!eig) throw ValidationError("wavepacket: thermal state needs an eigensystem");
        if (eig->vectors.rows() != n) throw ValidationError("wavepacket: eigensystem does not match the grid");
        if (!(spec.temperature_kelvin > 0.0) || !std::isfinite(spec.temperature_kelvin))
            throw ValidationError("wavepacket: temperature must be positive");
        const double kt = units::kBoltzmannHartree * spec.temperature_kelvin;
        const double scale = spec.weights == WavepacketSpec::ThermalWeights::Literal ? 1.0 : 0.5;
        const double e0 = eig->energies[0];  // common factor, cancels on normalisation
        for (Eigen::Index j = 0; j < eig->size(); ++j)
            psi += std::exp(-scale * (eig->energies[j] - e0) / kt) * eig->vectors.col(j);
        break;
    }
    }
    const double nrm = psi.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("wavepacket: state has zero norm on the grid");
    return (psi / nrm).cast<std::complex<double>>();
}

// ---------------------------------------------------------------------------
// Trajectories

enum class Method { Classical, Ising, CircuitExact, CircuitShots };

inline const char* method_name(Method m) {
    switch (m) {
    case Method::Classical: return "classical";
    case Method::Ising: return "ising";
    case Method::CircuitExact: return "circuit-exact";
    case Method::CircuitShots: return "circuit-shots";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "classical") return Method::Classical;
    if (s == "ising") return Method::Ising;
    if (s == "circuit-exact") return Method::CircuitExact;
    if (s == "circuit-shots") return Method::CircuitShots;
    throw ValidationError("unknown propagation method '" + s + "'");
}

struct TimeGrid {
    double dt_fs = 0.25;
    std::size_t steps = 8000;

    void validate() const {
        if (!(dt_fs > 0.0) || !std::isfinite(dt_fs)) throw ValidationError("time grid: dt must be positive");
        if (steps < 1) throw ValidationError("time grid: need at least one step");
    }
    double time_fs(std::size_t s) const { return static_cast<double>(s) * dt_fs; }
    double total_fs() const { return time_fs(steps); }
};

struct Trajectory {
    Method method = Method::Classical;
    int num_qubits = 1;
    double dt_fs = 0.0;
    std::vector<double> times_fs;
    Eigen::MatrixXd densities;                  // row s: grid density at t_s
    std::optional<Eigen::MatrixXcd> amplitudes;  // row s: grid amplitudes (exact methods)
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    std::size_t num_samples() const { return times_fs.size(); }
    bool empirical() const { return method == Method::CircuitShots; }
};

/// eps = mean over time samples and grid points of |rho_q - rho_c|.
inline double probability_error(const Trajectory& q, const Trajectory& c) {
    if (q.densities.rows() != c.densities.rows() || q.densities.cols() != c.densities.cols() ||
        q.times_fs.size() != c.times_fs.size())
        throw ValidationError("probability_error: trajectories have different axes");
    for (std::size_t s = 0; s < q.times_fs.size(); ++s)
        if (std::abs(q.times_fs[s] - c.times_fs[s]) > 1e-9 * std::max(1.0, std::abs(c.times_fs[s])))
            throw ValidationError("probability_error: time axes differ");
    if (q.densities.size() == 0) throw ValidationError("probability_error: empty trajectory");
    return (q.densities - c.densities).cwiseAbs().mean();
}

/// Everything derived once from a Hamiltonian and reused by every method.
struct PropagationModel {
    NuclearHamiltonian hamiltonian;
    EigenSystem eigen;
    GivensBasisMap givens;
    ParityPartition partition;
    BlockHamiltonian blocks;
    EigenSystem mapped_eigen;  // of P G H G^T P^T on the computational basis

    int num_qubits() const { return hamiltonian.grid.num_qubits; }
    DensityMaps maps() const { return {&givens, &partition}; }
};

inline PropagationModel make_model(const NuclearHamiltonian& h) {
    PropagationModel m;
    m.hamiltonian = h;
    m.eigen = eigensolve(h);
    const int n = h.grid.num_qubits;
    m.givens = givens_map(n);
    m.partition = parity_partition(n);
    m.blocks = block_transform(h, m.givens);
    m.mapped_eigen = eigensolve(permute_to_computational(m.blocks.transformed, m.partition));
    return m;
}

namespace detail {

inline Trajectory make_trajectory(Method method, int n, const TimeGrid& tg) {
    Trajectory t;
    t.method = method;
    t.num_qubits = n;
    t.dt_fs = tg.dt_fs;
    t.times_fs.resize(tg.steps + 1);
    for (std::size_t s = 0; s <= tg.steps; ++s) t.times_fs[s] = tg.time_fs(s);
    t.densities.resize(static_cast<Eigen::Index>(tg.steps + 1), Eigen::Index{1} << n);
    return t;
}

// psi(t_s) = X exp(-i E t_s) X^T psi0 for every step
inline Eigen::MatrixXcd spectral_evolution(const EigenSystem& es, const Eigen::VectorXcd& psi0, const TimeGrid& tg) {
    const Eigen::MatrixXcd x = es.vectors.cast<std::complex<double>>();
    const Eigen::VectorXcd c = x.adjoint() * psi0;
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(tg.steps + 1), psi0.size());
    Eigen::VectorXcd phased(c.size());
    for (std::size_t s = 0; s <= tg.steps; ++s) {
        const double t = units::fs_to_au(tg.time_fs(s));
        for (Eigen::Index j = 0; j < c.size(); ++j) phased[j] = c[j] * std::polar(1.0, -es.energies[j] * t);
        out.row(static_cast<Eigen::Index>(s)) = (x * phased).transpose();
    }
    return out;
}

inline void check_initial(const PropagationModel& m, const Eigen::VectorXcd& psi0) {
    if (psi0.size() != m.hamiltonian.dim()) throw ValidationError("propagate: initial state does not match the grid");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("propagate: initial state is not normalised");
}

inline void fill_from_amplitudes(Trajectory& t, Eigen::MatrixXcd amps) {
    t.densities = amps.cwiseAbs2();
    t.amplitudes = std::move(amps);
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads.
template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// SplitMix64 finaliser; decorrelates per-step seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed used for the shot draw at step s of a run seeded with `seed`.
constexpr std::uint64_t step_seed(std::uint64_t seed, std::size_t step) {
    return detail::mix_seed(seed ^ detail::mix_seed(static_cast<std::uint64_t>(step)));
}

inline Trajectory propagate_classical(const PropagationModel& m, const Eigen::VectorXcd& psi0, const TimeGrid& tg) {
    tg.validate();
    detail::check_initial(m, psi0);
    Trajectory t = detail::make_trajectory(Method::Classical, m.num_qubits(), tg);
    detail::fill_from_amplitudes(t, detail::spectral_evolution(m.eigen, psi0, tg));
    return t;
}

/// Evolution under the assembled Ising blocks, read back on the grid.
inline Trajectory propagate_ising(const PropagationModel& m, const MappedSystem& ms, const Eigen::VectorXcd& psi0,
                                  const TimeGrid& tg) {
    tg.validate();
    detail::check_initial(m, psi0);
    if (ms.num_qubits != m.num_qubits()) throw ValidationError("propagate: mapped system has the wrong qubit count");
    const EigenSystem es = eigensolve(ms.computational_hamiltonian(m.partition));
    const Eigen::VectorXcd mapped0 = to_mapped_basis(psi0, m.givens, m.partition);
    const Eigen::MatrixXcd mapped = detail::spectral_evolution(es, mapped0, tg);
    Eigen::MatrixXcd amps(mapped.rows(), mapped.cols());
    for (Eigen::Index s = 0; s < mapped.rows(); ++s)
        amps.row(s) = from_mapped_basis(Eigen::VectorXcd(mapped.row(s).transpose()), m.givens, m.partition).transpose();
    Trajectory t = detail::make_trajectory(Method::Ising, m.num_qubits(), tg);
    detail::fill_from_amplitudes(t, std::move(amps));
    return t;
}

/// Mapped-register states produced by the compiled circuit for U(t_s), one per step.
struct CircuitRun {
    TimeGrid time;
    std::vector<Eigen::VectorXcd> mapped_states;
    std::size_t gates_per_circuit = 0;
    std::size_t cnots_per_circuit = 0;
    double max_norm_drift = 0.0;
};

inline CircuitRun run_circuits(const PropagationModel& m, const Eigen::VectorXcd& psi0, const TimeGrid& tg,
                               unsigned jobs = 1) {
    tg.validate();
    detail::check_initial(m, psi0);
    const StateVector mapped0 = StateVector::from(to_mapped_basis(psi0, m.givens, m.partition));
    CircuitRun run;
    run.time = tg;
    run.mapped_states.resize(tg.steps + 1);
    std::vector<double> drift(tg.steps + 1, 0.0);
    std::vector<std::size_t> gates(tg.steps + 1, 0), cnots(tg.steps + 1, 0);
    detail::parallel_for(tg.steps + 1, jobs, [&](std::size_t s) {
        const Eigen::MatrixXcd u = exact_propagator(m.mapped_eigen, units::fs_to_au(tg.time_fs(s)));
        const GateSequence seq = qsd_compile(u);
        StateVector out = run_circuit(mapped0, seq);
        drift[s] = std::abs(out.norm() - 1.0);
        gates[s] = seq.size();
        cnots[s] = seq.count(GateKind::CNOT);
        run.mapped_states[s] = std::move(out.amplitudes);
    });
    run.max_norm_drift = *std::max_element(drift.begin(), drift.end());
    if (run.max_norm_drift > 1e-9) throw NumericalError("propagate: circuit execution lost normalisation");
    run.gates_per_circuit = gates.front();
    run.cnots_per_circuit = cnots.front();
    return run;
}

inline Trajectory circuit_trajectory(const PropagationModel& m, const CircuitRun& run) {
    const auto rows = static_cast<Eigen::Index>(run.mapped_states.size());
    Eigen::MatrixXcd amps(rows, m.hamiltonian.dim());
    for (Eigen::Index s = 0; s < rows; ++s)
        amps.row(s) = from_mapped_basis(run.mapped_states[static_cast<std::size_t>(s)], m.givens, m.partition).transpose();
    Trajectory t = detail::make_trajectory(Method::CircuitExact, m.num_qubits(), run.time);
    detail::fill_from_amplitudes(t, std::move(amps));
    return t;
}

/// Shot-sampled densities from circuit states; `reference` supplies the
/// within-pair split (see probability_density).
inline Trajectory sample_trajectory(const PropagationModel& m, const CircuitRun& run, const Trajectory& reference,
                                    std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw ValidationError("propagate: circuit-shots needs a positive shot count");
    if (reference.num_samples() != run.mapped_states.size())
        throw ValidationError("propagate: reference trajectory has a different time axis");
    Trajectory t = detail::make_trajectory(Method::CircuitShots, m.num_qubits(), run.time);
    t.shots = shots;
    t.seed = seed;
    const auto maps = m.maps();
    for (std::size_t s = 0; s < run.mapped_states.size(); ++s) {
        StateVector psi{m.num_qubits(), run.mapped_states[s]};
        psi.amplitudes /= psi.norm();
        const ShotResult r = sample_shots(psi, shots, step_seed(seed, s));
        const Eigen::VectorXd ref = reference.densities.row(static_cast<Eigen::Index>(s)).transpose();
        t.densities.row(static_cast<Eigen::Index>(s)) = probability_density(r, Basis::Mapped, maps, &ref).transpose();
    }
    return t;
}

struct PropagateOptions {
    const MappedSystem* mapped = nullptr;  // required for Method::Ising
    std::uint64_t shots = 0;               // required for Method::CircuitShots
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

inline Trajectory propagate(Method method, const PropagationModel& m, const Eigen::VectorXcd& psi0, const TimeGrid& tg,
                            const PropagateOptions& opt = {}) {
    switch (method) {
    case Method::Classical: return propagate_classical(m, psi0, tg);
    case Method::Ising:
        if (!opt.mapped) throw ValidationError("propagate: ising method needs a mapped system");
        return propagate_ising(m, *opt.mapped, psi0, tg);
    case Method::CircuitExact: return circuit_trajectory(m, run_circuits(m, psi0, tg, opt.jobs));
    case Method::CircuitShots: {
        if (opt.shots == 0) throw ValidationError("propagate: circuit-shots needs a positive shot count");
        const CircuitRun run = run_circuits(m, psi0, tg, opt.jobs);
        return sample_trajectory(m, run, propagate_classical(m, psi0, tg), opt.shots, opt.seed);
    }
    }
    throw ValidationError("propagate: unknown method");
}

// ---------------------------------------------------------------------------
// Shot-noise statistics

inline double median(std::vector<double> v) {
    if (v.empty()) throw ValidationError("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Least-squares slope of log10(y) against log10(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need matching series of length >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("loglog_slope: values must be positive");
        mx += std::log10(x[i]);
        my += std::log10(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log10(x[i]) - mx;
        sxy += dx * (std::log10(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace nucdyn

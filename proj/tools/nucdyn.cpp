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

// nucdyn command-line front end.

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nucdyn.hpp"

namespace {

using namespace nucdyn;
using nlohmann::json;

enum Exit : int { kOk = 0, kValidation = 2, kNumerical = 3, kRefused = 4 };

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool force = false;
};

struct CompileOptions {
    std::optional<double> time_fs;
    bool verify = false;
};

struct Context {
    RunConfig config;
    std::filesystem::path out;
    unsigned jobs = 1;
};

Context make_context(const CommonOptions& o) {
    Context c;
    c.config = load_config(o.config);
    if (o.seed) c.config.dynamics.seed = *o.seed;
    if (o.force) c.config.map.force = true;
    c.out = o.out.empty() ? std::filesystem::path(c.config.output_dir) : std::filesystem::path(o.out);
    c.jobs = o.jobs;
    return c;
}

MappedSystem map_for(const RunConfig& cfg, const PropagationModel& m) {
    MapOptions opt;
    opt.force = cfg.map.force;
    opt.global = cfg.map.global;
    opt.coupling_threshold = cfg.map.coupling_threshold;
    return map_system(m.blocks, m.partition, opt);
}

Eigen::VectorXcd initial_state(const RunConfig& cfg, const PropagationModel& m) {
    return initial_wavepacket(cfg.dynamics.wavepacket, m.hamiltonian.grid, &m.eigen);
}

struct Propagated {
    Trajectory trajectory;
    std::optional<Trajectory> reference;
};

Propagated run_dynamics(const Context& ctx, const PropagationModel& m) {
    const auto& d = ctx.config.dynamics;
    const Eigen::VectorXcd psi0 = initial_state(ctx.config, m);
    Propagated p{propagate_classical(m, psi0, d.time), std::nullopt};
    switch (d.method) {
    case Method::Classical: break;
    case Method::Ising: {
        const MappedSystem ms = map_for(ctx.config, m);
        p.reference = std::move(p.trajectory);
        p.trajectory = propagate_ising(m, ms, psi0, d.time);
        break;
    }
    case Method::CircuitExact:
        p.reference = std::move(p.trajectory);
        p.trajectory = circuit_trajectory(m, run_circuits(m, psi0, d.time, ctx.jobs));
        break;
    case Method::CircuitShots: {
        const CircuitRun run = run_circuits(m, psi0, d.time, ctx.jobs);
        p.reference = std::move(p.trajectory);
        p.trajectory = sample_trajectory(m, run, *p.reference, d.shots, d.seed);
        break;
    }
    }
    return p;
}

json epsilon_report(const Propagated& p) {
    json j = {{"method", method_name(p.trajectory.method)}};
    if (p.reference) j["epsilon_vs_classical"] = probability_error(p.trajectory, *p.reference);
    if (p.trajectory.empirical()) {
        j["shots"] = p.trajectory.shots;
        j["seed"] = p.trajectory.seed;
    }
    return j;
}

void print_epsilon(const json& eps) {
    if (eps.contains("epsilon_vs_classical"))
        std::printf("epsilon(%s vs classical) = %.6e\n", eps["method"].get<std::string>().c_str(),
                    eps["epsilon_vs_classical"].get<double>());
}

int cmd_build(const Context& ctx) {
    const GridSpec grid = config_grid(ctx.config);
    const PotentialSurface surface = eval_potential(grid, config_potential(ctx.config));
    const NuclearHamiltonian h = assemble_hamiltonian(grid, daf_kinetic(grid, ctx.config.daf), surface);
    const EigenSystem es = eigensolve(h);
    io::RunDirectory dir(ctx.out, "build");
    dir.write_json("resolved_config.json", resolved_json(ctx.config));
    dir.write("grid.csv", io::grid_csv(grid, surface.values));
    dir.write("hamiltonian.csv", io::matrix_csv(h.matrix));
    dir.write("eigenvalues.csv", io::eigenvalues_csv(es));
    dir.finish({{"num_qubits", grid.num_qubits}, {"symmetric_potential", surface.symmetric}});
    std::printf("grid points: %zu  spacing: %.6f angstrom  symmetric: %s\n", grid.num_points(), grid.spacing_angstrom(),
                surface.symmetric ? "yes" : "no");
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(es.size(), 4); ++j)
        std::printf("E_%ld - E_0 = %.4f cm^-1\n", static_cast<long>(j),
                    units::hartree_to_wavenumber(es.energies[j] - es.energies[0]));
    return kOk;
}

int cmd_map(const Context& ctx) {
    const PropagationModel m = make_model(config_hamiltonian(ctx.config));
    const MappedSystem ms = map_for(ctx.config, m);
    json report = {{"num_qubits", ms.num_qubits},
                   {"forced", ctx.config.map.force},
                   {"block_coupling_residual", ms.block_coupling_residual},
                   {"hamiltonian_norm", ms.source_norm}};
    json blocks = json::array();
    for (int b = 0; b < 2; ++b)
        blocks.push_back({{"block", b == 0 ? "even" : "odd"},
                          {"diagonal_residual", ms.params[b].diagonal_residual},
                          {"off_diagonal_residual", ms.params[b].offdiagonal_residual},
                          {"reconstruction_error", ms.reconstruction_error[b]},
                          {"block_norm", ms.block_norm[b]}});
    report["blocks"] = blocks;
    io::RunDirectory dir(ctx.out, "map");
    dir.write_json("resolved_config.json", resolved_json(ctx.config));
    dir.write_json("ising.json", to_json(ms));
    dir.write_json("map_report.json", report);
    dir.finish({{"num_qubits", ms.num_qubits}});
    for (int b = 0; b < 2; ++b)
        std::printf("block %s: diagonal residual %.3e  off-diagonal residual %.3e  reconstruction %.3e\n",
                    b == 0 ? "even" : "odd", ms.params[b].diagonal_residual, ms.params[b].offdiagonal_residual,
                    ms.reconstruction_error[b]);
    std::printf("inter-block coupling: %.3e\n", ms.block_coupling_residual);
    return kOk;
}

int cmd_compile(const Context& ctx, const CompileOptions& co) {
    const PropagationModel m = make_model(config_hamiltonian(ctx.config));
    const double t_fs = co.time_fs.value_or(ctx.config.compile.time_fs);
    const bool verify = co.verify || ctx.config.compile.verify;
    const Eigen::MatrixXcd u = exact_propagator(m.mapped_eigen, units::fs_to_au(t_fs));
    const GateSequence seq = qsd_compile(u);
    const std::string qasm = write_qasm(seq);
    const GateSequence back = read_qasm(qasm);
    const bool round_trip = back.without_phases().gates() == seq.without_phases().gates() &&
                            std::abs(std::remainder(back.total_phase() - seq.total_phase(), 2.0 * units::kPi)) < 1e-12;
    if (!round_trip) throw NumericalError("compile: OpenQASM round trip does not reproduce the circuit");
    const int n = seq.num_qubits();
    json summary = {{"num_qubits", n},
                    {"time_fs", t_fs},
                    {"gates", seq.size()},
                    {"cnot", seq.count(GateKind::CNOT)},
                    {"ry", seq.count(GateKind::Ry)},
                    {"rz", seq.count(GateKind::Rz)},
                    {"global_phase", seq.count(GateKind::GlobalPhase)},
                    {"cnot_formula", cnot_count(n)},
                    {"cnot_lower_bound", cnot_lower_bound(n)},
                    {"cnot_lower_bound_ceiling", std::ceil(cnot_lower_bound(n))},
                    {"qasm_round_trip", round_trip}};
    if (verify) {
        const double err = (circuit_unitary(seq) - u).norm();
        summary["reconstruction_error"] = err;
        if (!(err <= 1e-9)) throw NumericalError("compile: reconstruction error " + std::to_string(err) + " exceeds 1e-9");
    }
    io::RunDirectory dir(ctx.out, "compile");
    dir.write_json("resolved_config.json", resolved_json(ctx.config));
    dir.write("circuit.qasm", qasm);
    dir.write_json("compile_summary.json", summary);
    dir.finish({{"num_qubits", n}});
    std::printf("qubits: %d  gates: %zu  cnots: %zu (formula %llu, lower bound %.2f)\n", n, seq.size(),
                seq.count(GateKind::CNOT), static_cast<unsigned long long>(cnot_count(n)), cnot_lower_bound(n));
    if (verify) std::printf("reconstruction error: %.3e\n", summary["reconstruction_error"].get<double>());
    return kOk;
}

int cmd_propagate(const Context& ctx) {
    const PropagationModel m = make_model(config_hamiltonian(ctx.config));
    const Propagated p = run_dynamics(ctx, m);
    const json eps = epsilon_report(p);
    io::RunDirectory dir(ctx.out, "propagate");
    dir.write_json("resolved_config.json", resolved_json(ctx.config));
    dir.write("trajectory.csv", io::trajectory_csv(p.trajectory));
    dir.write_json("epsilon.json", eps);
    dir.finish({{"method", method_name(p.trajectory.method)}, {"seed", ctx.config.dynamics.seed}});
    std::printf("steps: %zu  dt: %g fs  method: %s\n", ctx.config.dynamics.time.steps, ctx.config.dynamics.time.dt_fs,
                method_name(p.trajectory.method));
    print_epsilon(eps);
    return kOk;
}

int cmd_spectrum(const Context& ctx) {
    const PropagationModel m = make_model(config_hamiltonian(ctx.config));
    const Propagated p = run_dynamics(ctx, m);
    const auto& opt = ctx.config.spectrum.options;
    const Spectrum sp = ctx.config.spectrum.source == "autocorrelation"
                            ? autocorrelation_spectrum(p.trajectory, opt)
                            : grid_spectrum(p.trajectory, m.hamiltonian.grid.spacing_angstrom(), opt);
    const auto matches = compare_eigendiffs(sp, m.eigen);
    const std::size_t levels = std::min<std::size_t>(ctx.config.spectrum.levels, static_cast<std::size_t>(m.eigen.size() - 1));
    const auto level_errors = level_difference_errors(sp, m.eigen, levels);
    const json eps = epsilon_report(p);
    io::RunDirectory dir(ctx.out, "spectrum");
    dir.write_json("resolved_config.json", resolved_json(ctx.config));
    dir.write("spectrum.csv", io::spectrum_csv(sp));
    dir.write_json("peaks.json", io::peaks_json(sp, matches, level_errors));
    dir.write_json("epsilon.json", eps);
    dir.finish({{"method", method_name(p.trajectory.method)}, {"seed", ctx.config.dynamics.seed}});
    std::printf("resolution: %.3f cm^-1  peaks: %zu\n", sp.resolution_cm1, sp.peaks.size());
    std::printf("%14s %14s %14s %12s\n", "omega_cm1", "intensity", "nearest_cm1", "error_cm1");
    for (const auto& pm : matches)
        std::printf("%14.4f %14.6e %14.4f %12.4f\n", pm.peak.omega_cm1, pm.peak.intensity, pm.line_cm1, pm.error_cm1);
    for (const auto& l : level_errors)
        std::printf("E_%zu - E_0 = %.4f cm^-1  peak %.4f  error %.4f cm^-1 (%.2e kcal/mol)\n", l.level, l.line_cm1,
                    l.peak_cm1, l.error_cm1, l.error_kcal);
    print_epsilon(eps);
    return kOk;
}

int cmd_sweep_shots(const Context& ctx) {
    const auto& cfg = ctx.config;
    const PropagationModel m = make_model(config_hamiltonian(cfg));
    const Eigen::VectorXcd psi0 = initial_state(cfg, m);
    const Trajectory reference = propagate_classical(m, psi0, cfg.dynamics.time);
    const CircuitRun run = run_circuits(m, psi0, cfg.dynamics.time, ctx.jobs);
    const std::size_t ns = cfg.sweep.shots.size(), nseed = cfg.sweep.seeds;
    std::vector<double> eps(ns * nseed);
    detail::parallel_for(eps.size(), ctx.jobs, [&](std::size_t k) {
        const std::uint64_t seed = cfg.dynamics.seed + k % nseed;
        eps[k] = probability_error(sample_trajectory(m, run, reference, cfg.sweep.shots[k / nseed], seed), reference);
    });
    std::string csv = "shots,seed,epsilon\n";
    std::vector<double> xs, medians;
    json per_shots = json::array();
    for (std::size_t i = 0; i < ns; ++i) {
        std::vector<double> col(eps.begin() + static_cast<std::ptrdiff_t>(i * nseed),
                                eps.begin() + static_cast<std::ptrdiff_t>((i + 1) * nseed));
        for (std::size_t k = 0; k < nseed; ++k)
            csv += std::to_string(cfg.sweep.shots[i]) + "," + std::to_string(cfg.dynamics.seed + k) + "," + io::num(col[k]) + "\n";
        xs.push_back(static_cast<double>(cfg.sweep.shots[i]));
        medians.push_back(median(col));
        per_shots.push_back({{"shots", cfg.sweep.shots[i]}, {"median_epsilon", medians.back()}});
    }
    json summary = {{"num_qubits", m.num_qubits()}, {"seeds", nseed}, {"first_seed", cfg.dynamics.seed}, {"per_shots", per_shots}};
    if (ns >= 2) summary["loglog_slope"] = loglog_slope(xs, medians);
    io::RunDirectory dir(ctx.out, "sweep-shots");
    dir.write_json("resolved_config.json", resolved_json(cfg));
    dir.write("sweep.csv", csv);
    dir.write_json("sweep_summary.json", summary);
    dir.finish({{"seed", cfg.dynamics.seed}});
    for (std::size_t i = 0; i < ns; ++i)
        std::printf("shots %10llu  median epsilon %.4e\n", static_cast<unsigned long long>(cfg.sweep.shots[i]), medians[i]);
    if (ns >= 2) std::printf("log-log slope: %.4f\n", summary["loglog_slope"].get<double>());
    return kOk;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return kRefused;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nucdyn: nuclear quantum dynamics on grids, Ising maps and compiled circuits"};
    app.require_subcommand(1);
    CommonOptions common;
    CompileOptions compile;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "run configuration (JSON)")->required();
        sub->add_option("--out", common.out, "run directory (overrides output_dir)");
        sub->add_option("--seed", common.seed, "shot-sampling seed (overrides dynamics.seed)");
        sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_flag("--force", common.force, "map even when reflection symmetry is broken");
    };
    auto* build = app.add_subcommand("build", "grid Hamiltonian and eigensystem");
    auto* map = app.add_subcommand("map", "Givens/parity transform and Ising parameters");
    auto* comp = app.add_subcommand("compile", "compile U(t) into an OpenQASM circuit");
    auto* prop = app.add_subcommand("propagate", "density trajectory");
    auto* spec = app.add_subcommand("spectrum", "Fourier spectrum and peak table");
    auto* sweep = app.add_subcommand("sweep-shots", "shot-noise error sweep");
    for (auto* sub : {build, map, comp, prop, spec, sweep}) add_common(sub);
    comp->add_option("--time-fs", compile.time_fs, "propagation time in fs (overrides compile.time_fs)");
    comp->add_flag("--verify", compile.verify, "check the gate product against U(t)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    return guarded([&]() -> int {
        const Context ctx = make_context(common);
        if (*build) return cmd_build(ctx);
        if (*map) return cmd_map(ctx);
        if (*comp) return cmd_compile(ctx, compile);
        if (*prop) return cmd_propagate(ctx);
        if (*spec) return cmd_spectrum(ctx);
        return cmd_sweep_shots(ctx);
    });
}

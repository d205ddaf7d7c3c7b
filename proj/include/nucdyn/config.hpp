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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nucdyn/dynamics.hpp"
#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/ising.hpp"
#include "nucdyn/spectra.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn {

/// Everything a CLI run needs. Physical quantities carry their unit in the
/// key name; every field has a default that appears in the resolved echo.
struct RunConfig {
    struct Grid {
        int num_qubits = 3;
        double length_angstrom = 0.66;
        double center_angstrom = 0.0;
        std::string mass = "proton";  // proton | deuteron | custom
        double mass_electron_masses = units::kProtonMass;
    } grid;

    struct Potential {
        std::string model = "builtin_double_well";  // builtin_double_well | double_well | harmonic | polynomial | table
        double barrier_kcalmol = 1.0;
        double minimum_offset_angstrom = 0.12;
        double force_constant_kcalmol_per_angstrom2 = 0.0;
        std::vector<double> coefficients_kcalmol;  // c_k multiplies u^k, u in angstrom
        std::string file;                          // CSV x_angstrom,energy_hartree
    } potential;

    DafParams daf;

    struct Dynamics {
        WavepacketSpec wavepacket;
        TimeGrid time;
        Method method = Method::Classical;
        std::uint64_t shots = 1000;
        std::uint64_t seed = 1;
    } dynamics;

    struct Spectrum {
        SpectrumOptions options;
        std::string source = "grid";  // grid | autocorrelation
        std::size_t levels = 3;       // E_j - E_0 lines reported
    } spectrum;

    struct Map {
        bool force = false;
        bool global = false;
        double coupling_threshold = 1e-8;
    } map;

    struct Compile {
        double time_fs = 10.0;
        bool verify = false;
    } compile;

    struct Sweep {
        std::vector<std::uint64_t> shots{1000, 10000, 100000, 1000000};
        std::size_t seeds = 20;
    } sweep;

    std::string output_dir = "run";
    std::filesystem::path base_dir;  // directory of the config file; relative paths resolve here

    std::filesystem::path potential_path() const {
        const std::filesystem::path p(potential.file);
        return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
};

namespace detail {

/// Walks one JSON object, checking types and ranges and rejecting unknown
/// keys; messages carry the JSON pointer of the offending value.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "/" : path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ValidationError("config " + where + ": " + what);
    }

    void number(const std::string& key, double& out, double lo, double hi, bool open_lo = false) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x) || x > hi || (open_lo ? x <= lo : x < lo))
            fail(at(key), "value " + v.dump() + " outside " + (open_lo ? "(" : "[") + nlohmann::json(lo).dump() + ", " +
                              nlohmann::json(hi).dump() + "]");
        out = x;
    }

    template <typename Int>
    void integer(const std::string& key, Int& out, long long lo, long long hi) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        const long long x = v.is_number_unsigned() && v.get<unsigned long long>() > static_cast<unsigned long long>(hi)
                                ? hi + 1
                                : v.get<long long>();
        if (x < lo || x > hi) fail(at(key), "value " + v.dump() + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out = static_cast<Int>(x);
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        out = v.get<bool>();
    }

    void string(const std::string& key, std::string& out, const std::vector<std::string>& allowed = {}) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        const auto s = v.get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(at(key), "'" + s + "' is not one of {" + list + "}");
        }
        out = s;
    }

    const nlohmann::json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) fail(at(key), "unknown key");
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_grid(const nlohmann::json& j, RunConfig::Grid& g) {
    ObjectReader r(j, "/grid");
    r.integer("num_qubits", g.num_qubits, 1, kMaxGridQubits);
    r.number("length_angstrom", g.length_angstrom, 0.0, 1e3, true);
    r.number("center_angstrom", g.center_angstrom, -1e3, 1e3);
    r.string("mass", g.mass, {"proton", "deuteron", "custom"});
    const bool custom_mass = r.has("mass_electron_masses");
    if (g.mass == "custom") {
        if (!custom_mass) ObjectReader::fail(r.at("mass_electron_masses"), "required when mass is 'custom'");
        r.number("mass_electron_masses", g.mass_electron_masses, 0.0, 1e7, true);
    } else {
        if (custom_mass) ObjectReader::fail(r.at("mass_electron_masses"), "only allowed when mass is 'custom'");
        g.mass_electron_masses = g.mass == "proton" ? units::kProtonMass : units::kDeuteronMass;
    }
    r.finish();
}

inline void read_potential(const nlohmann::json& j, RunConfig::Potential& p) {
    ObjectReader r(j, "/potential");
    r.string("model", p.model, {"builtin_double_well", "double_well", "harmonic", "polynomial", "table"});
    auto forbid_others = [&](std::initializer_list<const char*> allowed) {
        for (const char* k : {"barrier_kcalmol", "minimum_offset_angstrom", "force_constant_kcalmol_per_angstrom2",
                              "coefficients_kcalmol", "file"}) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return std::string(a) == k; }) !=
                allowed.end())
                continue;
            if (r.has(k)) ObjectReader::fail(r.at(k), "not used by model '" + p.model + "'");
        }
    };
    auto require = [&](const char* k) {
        if (!r.has(k)) ObjectReader::fail(r.at(k), "required by model '" + p.model + "'");
    };
    if (p.model == "builtin_double_well") {
        forbid_others({});
    } else if (p.model == "double_well") {
        forbid_others({"barrier_kcalmol", "minimum_offset_angstrom"});
        require("barrier_kcalmol");
        require("minimum_offset_angstrom");
        r.number("barrier_kcalmol", p.barrier_kcalmol, 0.0, 1e4, true);
        r.number("minimum_offset_angstrom", p.minimum_offset_angstrom, 0.0, 1e2, true);
    } else if (p.model == "harmonic") {
        forbid_others({"force_constant_kcalmol_per_angstrom2"});
        require("force_constant_kcalmol_per_angstrom2");
        r.number("force_constant_kcalmol_per_angstrom2", p.force_constant_kcalmol_per_angstrom2, 0.0, 1e8, true);
    } else if (p.model == "polynomial") {
        forbid_others({"coefficients_kcalmol"});
        require("coefficients_kcalmol");
        const auto& c = *r.child("coefficients_kcalmol");
        if (!c.is_array() || c.empty()) ObjectReader::fail(r.at("coefficients_kcalmol"), "expected a non-empty array");
        p.coefficients_kcalmol.clear();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_number() || !std::isfinite(c[i].get<double>()))
                ObjectReader::fail(r.at("coefficients_kcalmol") + "/" + std::to_string(i), "expected a finite number");
            p.coefficients_kcalmol.push_back(c[i].get<double>());
        }
    } else {
        forbid_others({"file"});
        require("file");
        r.string("file", p.file);
        if (p.file.empty()) ObjectReader::fail(r.at("file"), "must not be empty");
    }
    r.finish();
}

inline void read_daf(const nlohmann::json& j, DafParams& d) {
    ObjectReader r(j, "/daf");
    r.integer("order", d.order, 0, 200);
    r.number("sigma_ratio", d.sigma_ratio, 0.0, 1e3, true);
    r.finish();
    try {
        d.validate();
    } catch (const ValidationError& e) {
        ObjectReader::fail("/daf", e.what());
    }
}

inline void read_wavepacket(const nlohmann::json& j, WavepacketSpec& w) {
    ObjectReader r(j, "/dynamics/wavepacket");
    std::string kind = "gaussian";
    r.string("kind", kind, {"delta", "gaussian", "thermal"});
    std::vector<std::string> allowed;
    if (kind == "delta") {
        w.kind = WavepacketSpec::Kind::Delta;
        r.integer("donor_index", w.donor_index, 0, (1LL << kMaxGridQubits) - 1);
        allowed = {"kind", "donor_index"};
    } else if (kind == "gaussian") {
        w.kind = WavepacketSpec::Kind::Gaussian;
        r.number("mu_angstrom", w.mu_angstrom, -1e3, 1e3);
        r.number("sigma_angstrom", w.sigma_angstrom, 0.0, 1e3, true);
        allowed = {"kind", "mu_angstrom", "sigma_angstrom"};
    } else {
        w.kind = WavepacketSpec::Kind::Thermal;
        r.number("temperature_kelvin", w.temperature_kelvin, 0.0, 1e6, true);
        std::string weights = "literal";
        r.string("thermal_weights", weights, {"literal", "boltzmann"});
        w.weights = weights == "literal" ? WavepacketSpec::ThermalWeights::Literal : WavepacketSpec::ThermalWeights::Boltzmann;
        allowed = {"kind", "temperature_kelvin", "thermal_weights"};
    }
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            ObjectReader::fail(r.at(key), "not used by wavepacket kind '" + kind + "'");
    r.finish();
}

inline void read_dynamics(const nlohmann::json& j, RunConfig::Dynamics& d) {
    ObjectReader r(j, "/dynamics");
    if (const auto* w = r.child("wavepacket")) read_wavepacket(*w, d.wavepacket);
    r.number("dt_fs", d.time.dt_fs, 0.0, 1e4, true);
    r.integer("steps", d.time.steps, 1, 10'000'000);
    std::string method = method_name(d.method);
    r.string("method", method, {"classical", "ising", "circuit-exact", "circuit-shots"});
    d.method = parse_method(method);
    r.integer("shots", d.shots, 1, 1'000'000'000'000LL);
    r.integer("seed", d.seed, 0, std::numeric_limits<long long>::max());
    r.finish();
}

inline void read_spectrum(const nlohmann::json& j, RunConfig::Spectrum& s) {
    ObjectReader r(j, "/spectrum");
    std::string window = s.options.hann ? "hann" : "none";
    r.string("window", window, {"none", "hann"});
    s.options.hann = window == "hann";
    r.integer("padding", s.options.padding, 1, 64);
    r.number("threshold", s.options.threshold, 0.0, 1.0, true);
    r.string("source", s.source, {"grid", "autocorrelation"});
    r.integer("levels", s.levels, 1, 64);
    r.finish();
}

inline void read_map(const nlohmann::json& j, RunConfig::Map& m) {
    ObjectReader r(j, "/map");
    r.boolean("force", m.force);
    r.boolean("global", m.global);
    r.number("coupling_threshold", m.coupling_threshold, 0.0, 1.0);
    r.finish();
}

inline void read_compile(const nlohmann::json& j, RunConfig::Compile& c) {
    ObjectReader r(j, "/compile");
    r.number("time_fs", c.time_fs, -1e9, 1e9);
    r.boolean("verify", c.verify);
    r.finish();
}

inline void read_sweep(const nlohmann::json& j, RunConfig::Sweep& s) {
    ObjectReader r(j, "/sweep");
    if (const auto* shots = r.child("shots")) {
        if (!shots->is_array() || shots->empty()) ObjectReader::fail(r.at("shots"), "expected a non-empty array");
        s.shots.clear();
        for (std::size_t i = 0; i < shots->size(); ++i) {
            const auto& v = (*shots)[i];
            if (!v.is_number_integer() || v.get<long long>() < 1)
                ObjectReader::fail(r.at("shots") + "/" + std::to_string(i), "expected a positive integer");
            s.shots.push_back(v.get<std::uint64_t>());
        }
    }
    r.integer("seeds", s.seeds, 1, 100000);
    r.finish();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    RunConfig c;
    c.base_dir = base_dir;
    detail::ObjectReader r(j, "");
    if (const auto* v = r.child("grid")) detail::read_grid(*v, c.grid);
    if (const auto* v = r.child("potential")) detail::read_potential(*v, c.potential);
    if (const auto* v = r.child("daf")) detail::read_daf(*v, c.daf);
    if (const auto* v = r.child("dynamics")) detail::read_dynamics(*v, c.dynamics);
    if (const auto* v = r.child("spectrum")) detail::read_spectrum(*v, c.spectrum);
    if (const auto* v = r.child("map")) detail::read_map(*v, c.map);
    if (const auto* v = r.child("compile")) detail::read_compile(*v, c.compile);
    if (const auto* v = r.child("sweep")) detail::read_sweep(*v, c.sweep);
    r.string("output_dir", c.output_dir);
    r.finish();
    if (c.dynamics.wavepacket.kind == WavepacketSpec::Kind::Delta &&
        c.dynamics.wavepacket.donor_index >= (std::size_t{1} << c.grid.num_qubits))
        detail::ObjectReader::fail("/dynamics/wavepacket/donor_index", "outside the grid");
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

/// Fully explicit echo of a configuration.
inline nlohmann::json resolved_json(const RunConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"num_qubits", c.grid.num_qubits},
                 {"length_angstrom", c.grid.length_angstrom},
                 {"center_angstrom", c.grid.center_angstrom},
                 {"mass", c.grid.mass}};
    if (c.grid.mass == "custom") j["grid"]["mass_electron_masses"] = c.grid.mass_electron_masses;

    nlohmann::json pot = {{"model", c.potential.model}};
    if (c.potential.model == "double_well") {
        pot["barrier_kcalmol"] = c.potential.barrier_kcalmol;
        pot["minimum_offset_angstrom"] = c.potential.minimum_offset_angstrom;
    } else if (c.potential.model == "harmonic") {
        pot["force_constant_kcalmol_per_angstrom2"] = c.potential.force_constant_kcalmol_per_angstrom2;
    } else if (c.potential.model == "polynomial") {
        pot["coefficients_kcalmol"] = c.potential.coefficients_kcalmol;
    } else if (c.potential.model == "table") {
        pot["file"] = c.potential.file;
    }
    j["potential"] = pot;
    j["daf"] = {{"order", c.daf.order}, {"sigma_ratio", c.daf.sigma_ratio}};

    const auto& w = c.dynamics.wavepacket;
    nlohmann::json wp;
    switch (w.kind) {
    case WavepacketSpec::Kind::Delta: wp = {{"kind", "delta"}, {"donor_index", w.donor_index}}; break;
    case WavepacketSpec::Kind::Gaussian:
        wp = {{"kind", "gaussian"}, {"mu_angstrom", w.mu_angstrom}, {"sigma_angstrom", w.sigma_angstrom}};
        break;
    case WavepacketSpec::Kind::Thermal:
        wp = {{"kind", "thermal"},
              {"temperature_kelvin", w.temperature_kelvin},
              {"thermal_weights", w.weights == WavepacketSpec::ThermalWeights::Literal ? "literal" : "boltzmann"}};
        break;
    }
    j["dynamics"] = {{"wavepacket", wp},
                     {"dt_fs", c.dynamics.time.dt_fs},
                     {"steps", c.dynamics.time.steps},
                     {"method", method_name(c.dynamics.method)},
                     {"shots", c.dynamics.shots},
                     {"seed", c.dynamics.seed}};
    j["spectrum"] = {{"window", c.spectrum.options.hann ? "hann" : "none"},
                     {"padding", c.spectrum.options.padding},
                     {"threshold", c.spectrum.options.threshold},
                     {"source", c.spectrum.source},
                     {"levels", c.spectrum.levels}};
    j["map"] = {{"force", c.map.force}, {"global", c.map.global}, {"coupling_threshold", c.map.coupling_threshold}};
    j["compile"] = {{"time_fs", c.compile.time_fs}, {"verify", c.compile.verify}};
    j["sweep"] = {{"shots", c.sweep.shots}, {"seeds", c.sweep.seeds}};
    j["output_dir"] = c.output_dir;
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline pieces driven by a config

inline GridSpec config_grid(const RunConfig& c) {
    return build_grid(c.grid.num_qubits, c.grid.length_angstrom, c.grid.center_angstrom, c.grid.mass_electron_masses);
}

inline PotentialSource config_potential(const RunConfig& c) {
    const auto& p = c.potential;
    if (p.model == "builtin_double_well") return builtin_double_well();
    if (p.model == "double_well") return AnalyticPotential::double_well_from_barrier(p.barrier_kcalmol, p.minimum_offset_angstrom);
    if (p.model == "harmonic") return AnalyticPotential::harmonic(p.force_constant_kcalmol_per_angstrom2);
    if (p.model == "polynomial") return AnalyticPotential::polynomial(p.coefficients_kcalmol);
    return read_potential_csv(c.potential_path().string());
}

inline NuclearHamiltonian config_hamiltonian(const RunConfig& c) {
    const GridSpec grid = config_grid(c);
    const PotentialSurface surface = eval_potential(grid, config_potential(c));
    return assemble_hamiltonian(grid, daf_kinetic(grid, c.daf), surface);
}

}  // namespace nucdyn

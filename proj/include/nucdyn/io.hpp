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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nucdyn/dynamics.hpp"
#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/spectra.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn::io {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << num(m(i, j));
        os << "\n";
    }
    return os.str();
}

inline std::string eigenvalues_csv(const EigenSystem& es) {
    std::ostringstream os;
    os << "index,energy_hartree,energy_kcalmol,excitation_cm1\n";
    for (Eigen::Index j = 0; j < es.size(); ++j)
        os << j << "," << num(es.energies[j]) << "," << num(units::hartree_to_kcal(es.energies[j])) << ","
           << num(units::hartree_to_wavenumber(es.energies[j] - es.energies[0])) << "\n";
    return os.str();
}

inline std::string grid_csv(const GridSpec& g, const Eigen::VectorXd& potential) {
    std::ostringstream os;
    os << "index,x_angstrom,potential_hartree\n";
    for (std::size_t i = 0; i < g.num_points(); ++i)
        os << i << "," << num(g.point_angstrom(i)) << "," << num(potential[static_cast<Eigen::Index>(i)]) << "\n";
    return os.str();
}

/// `# key=value ...` line, then `t_fs,rho_0,...`.
inline std::string trajectory_csv(const Trajectory& t) {
    std::ostringstream os;
    os << "# method=" << method_name(t.method) << " num_qubits=" << t.num_qubits << " dt_fs=" << num(t.dt_fs);
    if (t.empirical()) os << " shots=" << t.shots << " seed=" << t.seed;
    os << "\n";
    os << "t_fs";
    for (Eigen::Index i = 0; i < t.densities.cols(); ++i) os << ",rho_" << i;
    os << "\n";
    for (std::size_t s = 0; s < t.times_fs.size(); ++s) {
        os << num(t.times_fs[s]);
        for (Eigen::Index i = 0; i < t.densities.cols(); ++i) os << "," << num(t.densities(static_cast<Eigen::Index>(s), i));
        os << "\n";
    }
    return os.str();
}

/// Reads trajectory_csv output back (densities only).
inline Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory t;
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string kv;
            while (ss >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const auto k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "method") t.method = parse_method(v);
                else if (k == "num_qubits") t.num_qubits = std::stoi(v);
                else if (k == "dt_fs") t.dt_fs = std::stod(v);
                else if (k == "shots") t.shots = std::stoull(v);
                else if (k == "seed") t.seed = std::stoull(v);
            }
            continue;
        }
        if (!header) {
            if (line.rfind("t_fs", 0) != 0) throw ValidationError("trajectory csv: missing t_fs header");
            header = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) throw ValidationError("trajectory csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().size() < 2) throw ValidationError("trajectory csv: no data");
    t.densities.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size() - 1));
    for (std::size_t s = 0; s < rows.size(); ++s) {
        t.times_fs.push_back(rows[s][0]);
        for (std::size_t i = 1; i < rows[s].size(); ++i)
            t.densities(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i - 1)) = rows[s][i];
    }
    return t;
}

inline std::string spectrum_csv(const Spectrum& sp) {
    std::ostringstream os;
    os << "omega_cm1,intensity\n";
    for (std::size_t k = 0; k < sp.omega_cm1.size(); ++k) os << num(sp.omega_cm1[k]) << "," << num(sp.intensity[k]) << "\n";
    return os.str();
}

inline nlohmann::json peaks_json(const Spectrum& sp, const std::vector<PeakMatch>& matches,
                                 const std::vector<LevelMatch>& levels) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const auto& m : matches)
        peaks.push_back({{"omega_cm1", m.peak.omega_cm1},
                         {"intensity", m.peak.intensity},
                         {"weight", m.peak.weight},
                         {"nearest_difference_cm1", m.line_cm1},
                         {"levels", {m.lower, m.upper}},
                         {"aliased", m.aliased},
                         {"error_cm1", m.error_cm1},
                         {"error_kcalmol", m.error_kcal}});
    nlohmann::json lv = nlohmann::json::array();
    for (const auto& l : levels)
        lv.push_back({{"level", l.level},
                      {"difference_cm1", l.line_cm1},
                      {"peak_cm1", l.peak_cm1},
                      {"error_cm1", l.error_cm1},
                      {"error_kcalmol", l.error_kcal}});
    return {{"window", sp.hann ? "hann" : "none"},
            {"padding", sp.padding},
            {"threshold", sp.threshold},
            {"samples", sp.samples},
            {"dt_fs", sp.dt_fs},
            {"resolution_cm1", sp.resolution_cm1},
            {"bin_cm1", sp.bin_cm1},
            {"nyquist_cm1", sp.nyquist_cm1},
            {"zero_frequency_weight", sp.zero_weight},
            {"peaks", peaks},
            {"level_differences", lv}};
}

/// 64-bit FNV-1a, used only to fingerprint outputs in the manifest.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Output directory whose files are written once; finish() adds manifest.json.
class RunDirectory {
public:
    RunDirectory(std::filesystem::path root, std::string command) : root_(std::move(root)), command_(std::move(command)) {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec || !std::filesystem::is_directory(root_))
            throw ValidationError("cannot create output directory " + root_.string());
        if (std::filesystem::exists(root_ / "manifest.json"))
            throw PreconditionError("output directory " + root_.string() + " already holds a finished run");
    }

    const std::filesystem::path& root() const { return root_; }

    void write(const std::string& name, const std::string& content) {
        const auto path = root_ / name;
        if (std::filesystem::exists(path)) throw PreconditionError("refusing to overwrite " + path.string());
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) throw ValidationError("cannot write " + path.string());
        files_.push_back({name, content.size(), fnv1a(content)});
    }

    void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

    void finish(const nlohmann::json& extra = nlohmann::json::object()) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& f : files_) {
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(f.hash));
            list.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", hex}});
        }
        nlohmann::json m = {{"command", command_}, {"files", list}};
        for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
        write_json("manifest.json", m);
    }

private:
    struct Entry {
        std::string name;
        std::size_t bytes;
        std::uint64_t hash;
    };
    std::filesystem::path root_;
    std::string command_;
    std::vector<Entry> files_;
};

}  // namespace nucdyn::io

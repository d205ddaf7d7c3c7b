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

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "nucdyn/error.hpp"
#include "nucdyn/qsd.hpp"

namespace nucdyn {

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

/// OpenQASM 2.0 text. GlobalPhase gates have no QASM form; their sum is kept
/// in a header comment so read_qasm can restore it as a single phase gate.
inline std::string write_qasm(const GateSequence& seq) {
    std::ostringstream os;
    os << "OPENQASM 2.0;\n"
       << "include \"qelib1.inc\";\n"
       << "// global phase dropped: " << detail::fmt17(seq.total_phase()) << "\n"
       << "qreg q[" << seq.num_qubits() << "];\n";
    for (const auto& g : seq.gates()) {
        switch (g.kind) {
        case GateKind::Ry: os << "ry(" << detail::fmt17(g.angle) << ") q[" << g.target << "];\n"; break;
        case GateKind::Rz: os << "rz(" << detail::fmt17(g.angle) << ") q[" << g.target << "];\n"; break;
        case GateKind::CNOT: os << "cx q[" << g.control << "],q[" << g.target << "];\n"; break;
        case GateKind::GlobalPhase: break;
        }
    }
    return os.str();
}

/// Parses the subset emitted by write_qasm.
inline GateSequence read_qasm(std::istream& in) {
    static const std::regex qreg_re(R"(^qreg\s+q\[(\d+)\]\s*;$)");
    static const std::regex rot_re(R"(^(ry|rz)\s*\(\s*([^)]+?)\s*\)\s*q\[(\d+)\]\s*;$)");
    static const std::regex cx_re(R"(^cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\]\s*;$)");
    static const std::regex phase_re(R"(^//\s*global phase dropped:\s*(\S+)\s*$)");

    std::string line;
    int lineno = 0;
    bool have_header = false;
    double phase = 0.0;
    bool have_phase = false;
    std::optional<GateSequence> seq;
    auto fail = [&](const std::string& what) {
        throw ValidationError("qasm line " + std::to_string(lineno) + ": " + what);
    };
    auto parse_angle = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail("bad angle '" + s + "'");
        }
        if (used != s.size()) fail("bad angle '" + s + "'");
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
        std::smatch m;
        if (std::regex_match(line, m, phase_re)) {
            phase = parse_angle(m[1]);
            have_phase = true;
            continue;
        }
        if (line.rfind("//", 0) == 0) continue;
        if (line == "OPENQASM 2.0;") {
            have_header = true;
            continue;
        }
        if (line.rfind("include", 0) == 0) continue;
        if (!have_header) fail("missing OPENQASM 2.0 header");
        if (std::regex_match(line, m, qreg_re)) {
            if (seq) fail("second qreg");
            seq.emplace(std::stoi(m[1]));
            if (have_phase) seq->push(Gate::phase(phase));
            continue;
        }
        if (!seq) fail("gate before qreg");
        if (std::regex_match(line, m, rot_re)) {
            const double a = parse_angle(m[2]);
            const int q = std::stoi(m[3]);
            seq->push(m[1] == "ry" ? Gate::ry(q, a) : Gate::rz(q, a));
        } else if (std::regex_match(line, m, cx_re)) {
            seq->push(Gate::cnot(std::stoi(m[1]), std::stoi(m[2])));
        } else {
            fail("unsupported statement '" + line + "'");
        }
    }
    if (!seq) throw ValidationError("qasm: no qreg declared");
    return std::move(*seq);
}

inline GateSequence read_qasm(const std::string& text) {
    std::istringstream is(text);
    return read_qasm(is);
}

}  // namespace nucdyn

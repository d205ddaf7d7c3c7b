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

// Hartree atomic units are used internally (hbar = m_e = 1). Conversions
// at the boundaries use CODATA 2018 values.

namespace nucdyn::units {

inline constexpr double kBohrAngstrom = 0.529177210903;
inline constexpr double kHartreeKcalMol = 627.5094740631;
inline constexpr double kHartreeWavenumber = 219474.6313632;
inline constexpr double kProtonMass = 1836.15267343;
inline constexpr double kDeuteronMass = 3670.48296788;
// atomic unit of time in femtoseconds
inline constexpr double kAuTimeFs = 0.02418884326585747;
// Boltzmann constant in Hartree per kelvin
inline constexpr double kBoltzmannHartree = 3.166811563e-6;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double angstrom_to_bohr(double x) { return x / kBohrAngstrom; }
constexpr double bohr_to_angstrom(double x) { return x * kBohrAngstrom; }
constexpr double kcal_to_hartree(double e) { return e / kHartreeKcalMol; }
constexpr double hartree_to_kcal(double e) { return e * kHartreeKcalMol; }
constexpr double wavenumber_to_hartree(double e) { return e / kHartreeWavenumber; }
constexpr double hartree_to_wavenumber(double e) { return e * kHartreeWavenumber; }
constexpr double fs_to_au(double t) { return t / kAuTimeFs; }
constexpr double au_to_fs(double t) { return t * kAuTimeFs; }

}  // namespace nucdyn::units

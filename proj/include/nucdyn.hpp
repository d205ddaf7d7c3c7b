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

#include "nucdyn/error.hpp"
#include "nucdyn/units.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/transforms.hpp"
#include "nucdyn/ising.hpp"
#include "nucdyn/qsd.hpp"
#include "nucdyn/qasm.hpp"
#include "nucdyn/sim.hpp"
#include "nucdyn/dynamics.hpp"
#include "nucdyn/spectra.hpp"
#include "nucdyn/config.hpp"
#include "nucdyn/io.hpp"

// Copyright 2026 The relaxtyp Authors
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

#include "relaxtyp/lindblad.hpp"

namespace relaxtyp {

struct SlowestModesOptions {
    /// Modes to return, counting the stationary one.
    Index n_modes = 2;
    /// Extra Ritz vectors kept across restarts.
    Index guard = 8;
    /// Basis size at which the Krylov space is restarted.
    Index krylov_dim = 60;
    int max_restarts = 500;
    /// Ritz residual target relative to the generator norm.
    double tol = 1e-10;
    std::uint64_t seed = 1;
    Normalization normalization = Normalization::TraceNorm;
};

/// Slowest modes by thick-restart Arnoldi with Rayleigh-Ritz extraction on
/// the generator and on its adjoint, both applied matrix-free. The generator
/// is never formed, so memory is O(krylov_dim d^2).
SpectralDecomposition slowest_modes(const LindbladModel& model,
                                    const SlowestModesOptions& options = {});

} // namespace relaxtyp

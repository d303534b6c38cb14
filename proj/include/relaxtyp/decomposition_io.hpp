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
#include <optional>
#include <string>

#include "relaxtyp/lindblad.hpp"

namespace relaxtyp {

/// FNV-1a over the model matrices and the decomposition options that affect the result.
std::uint64_t model_hash(const LindbladModel& model, const DecomposeOptions& options);

/// Binary cache: "RTSD", format version, d, mode count, normalization, model
/// hash, then eigenvalues, condition numbers, cluster sizes, rho_ss and every
/// (R_k, L_k) pair, matrices in row-major order.
void save_decomposition(const std::string& path, const SpectralDecomposition& decomp,
                        std::uint64_t hash);

/// Empty when the file is missing or was written for a different hash or format.
std::optional<SpectralDecomposition> load_decomposition(const std::string& path,
                                                        std::uint64_t hash);

} // namespace relaxtyp

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
#include <vector>

#include "relaxtyp/ensembles.hpp"
#include "relaxtyp/errors.hpp"
#include "relaxtyp/lindblad.hpp"
#include "relaxtyp/models.hpp"

namespace relaxtyp {

/// Malformed or inconsistent configuration; the message names the offending key.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

enum class Command { Spectrum, Typicality, Sweep, BoundCheck, OracleCheck, MixingTime };

std::string command_name(Command command);

enum class ModelBuilder { Chain, TFIM, DaviesRandom };

struct ModelConfig {
    ModelBuilder builder = ModelBuilder::Chain;
    ChainParams chain;
    TFIMParams tfim;
    int davies_qubits = 2;
    double davies_beta = 1.0;
    double davies_gamma = 1.0;
    std::uint64_t davies_seed = 1;

    int qubits() const;
    /// Copy with the qubit count replaced (sweeps).
    ModelConfig with_qubits(int n) const;
    double beta() const;
    std::string name() const;
};

enum class ReferenceKind { Pure, MaximallyMixed, Diagonal };
enum class ProjectorKind { Identity, Random };

/// Dimension-free ensemble description; realized for a concrete d by make_ensemble.
struct EnsembleConfig {
    EnsembleKind kind = EnsembleKind::HilbertSchmidt;
    ReferenceKind reference = ReferenceKind::Pure;
    std::vector<double> populations;
    Index d_b = 1;
    Index dim_e = 1;
    ProjectorKind projector = ProjectorKind::Identity;
    Index rank = 1;
    std::uint64_t projector_seed = 1;

    std::string name() const;
};

struct ModeSelection {
    enum class Kind { List, Slowest, All } kind = Kind::Slowest;
    std::vector<int> modes;

    /// Concrete 1-based mode list for a decomposition with `available` modes.
    std::vector<int> resolve(Index available) const;
    int max_mode(Index d) const;
};

struct RunConfig {
    Command command = Command::Spectrum;
    std::optional<ModelConfig> model;
    std::vector<EnsembleConfig> ensembles;
    ModeSelection modes;
    Index n_samples = 0;
    std::optional<std::uint64_t> seed;
    double eps = 0.01;
    std::optional<double> delta;
    std::optional<double> delta_sigma;
    double horizon = 0.0;
    int grid = 200;
    Normalization normalization = Normalization::TraceNorm;
    std::string output = "relaxtyp.csv";
    std::string summary;
    int sweep_min = 2;
    int sweep_max = 4;
    unsigned threads = 1;
    std::string cache_dir;
    bool record_runtime = false;
    bool iterative = false;
    bool max_overlap = false;
    int instances = 1;
    std::optional<double> tol_mean;
    std::optional<double> tol_var;
    double oracle_tol = 1e-7;

    /// Summary path; defaults to the output path with ".json" appended.
    std::string summary_path() const;
    /// FNV-1a of the canonical JSON form of the effective configuration.
    std::string hash() const;
    std::string canonical;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies command-line overrides and re-validates.
void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed,
                     std::optional<std::string> output, std::optional<unsigned> threads);

LindbladModel build_model(const ModelConfig& model);

EnsembleSpec make_ensemble(const EnsembleConfig& config, Index d);

} // namespace relaxtyp

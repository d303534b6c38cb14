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
#include <random>
#include <string>

#include "relaxtyp/matcore.hpp"

namespace relaxtyp {

/// Seed for sample `index` of a run with base seed `base` (splitmix64 of both).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// mt19937_64 with explicit uniform and Box-Muller normal transforms, so
/// draws are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal();
    /// Real and imaginary parts independent N(0, 1/2).
    Complex complex_normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

CMatrix ginibre(Index rows, Index cols, Rng& rng);
CMatrix haar_unitary(Index d, Rng& rng);
CVector haar_vector(Index d, Rng& rng);

CMatrix sample_haar_unitary(Index d, std::uint64_t seed);

enum class EnsembleKind { TwoDesign, HilbertSchmidt, Induced, ConstrainedPure };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::HilbertSchmidt;
    Index dim = 0;
    /// TwoDesign reference state.
    CMatrix reference;
    /// Environment dimension: d_B for Induced, dim_E for ConstrainedPure.
    Index env_dim = 0;
    /// ConstrainedPure projector on the (dim * env_dim)-dimensional space S (x) E.
    CMatrix projector;

    static EnsembleSpec two_design(const CMatrix& reference);
    /// TwoDesign on the pure reference |0><0|.
    static EnsembleSpec two_design_pure(Index d);
    static EnsembleSpec hilbert_schmidt(Index d);
    static EnsembleSpec induced(Index d, Index d_b);
    static EnsembleSpec constrained_pure(const CMatrix& projector, Index d, Index dim_e);

    void validate() const;
    /// round(tr P_R) for ConstrainedPure.
    Index range_dim() const;
    std::string name() const;
};

/// Reusable sampler; ConstrainedPure precomputes an orthonormal basis of range(P_R).
class StateSampler {
public:
    explicit StateSampler(EnsembleSpec spec);

    CMatrix sample(std::uint64_t seed) const;
    const EnsembleSpec& spec() const { return spec_; }

private:
    EnsembleSpec spec_;
    CMatrix range_basis_;
    bool maximally_mixed_reference_ = false;
};

CMatrix sample_state(const EnsembleSpec& spec, std::uint64_t seed);

} // namespace relaxtyp

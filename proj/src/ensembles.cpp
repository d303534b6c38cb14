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

#include "relaxtyp/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relaxtyp/errors.hpp"

namespace relaxtyp {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(base) ^ index);
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

Complex Rng::complex_normal()
{
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * std::sqrt(0.5);
}

CMatrix ginibre(Index rows, Index cols, Rng& rng)
{
    CMatrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

CMatrix haar_unitary(Index d, Rng& rng)
{
    if (d < 1) {
        throw InvalidArgument("haar_unitary: dimension must be positive");
    }
    const CMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix& r = qr.matrixQR();
    for (Index j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) {
            q.col(j) *= rjj / mag;
        }
    }
    return q;
}

CVector haar_vector(Index d, Rng& rng)
{
    CVector v(d);
    for (Index i = 0; i < d; ++i) {
        v(i) = rng.complex_normal();
    }
    return v / v.norm();
}

CMatrix sample_haar_unitary(Index d, std::uint64_t seed)
{
    Rng rng(seed);
    return haar_unitary(d, rng);
}

EnsembleSpec EnsembleSpec::two_design(const CMatrix& reference)
{
    EnsembleSpec s;
    s.kind = EnsembleKind::TwoDesign;
    s.dim = reference.rows();
    s.reference = reference;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::two_design_pure(Index d)
{
    CMatrix ref = CMatrix::Zero(d, d);
    ref(0, 0) = 1.0;
    return two_design(ref);
}

EnsembleSpec EnsembleSpec::hilbert_schmidt(Index d)
{
    EnsembleSpec s;
    s.kind = EnsembleKind::HilbertSchmidt;
    s.dim = d;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::induced(Index d, Index d_b)
{
    EnsembleSpec s;
    s.kind = EnsembleKind::Induced;
    s.dim = d;
    s.env_dim = d_b;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::constrained_pure(const CMatrix& projector, Index d, Index dim_e)
{
    EnsembleSpec s;
    s.kind = EnsembleKind::ConstrainedPure;
    s.dim = d;
    s.env_dim = dim_e;
    s.projector = projector;
    s.validate();
    return s;
}

void EnsembleSpec::validate() const
{
    if (dim < 1) {
        throw InvalidArgument("ensemble: dimension must be positive");
    }
    switch (kind) {
    case EnsembleKind::TwoDesign:
        if (reference.rows() != dim || reference.cols() != dim) {
            throw InvalidArgument("ensemble: reference state is not d x d");
        }
        if (!is_density_matrix(reference, 1e-10)) {
            throw InvalidArgument("ensemble: reference is not a density matrix");
        }
        break;
    case EnsembleKind::HilbertSchmidt:
        break;
    case EnsembleKind::Induced:
        if (env_dim < 1) {
            throw InvalidArgument("ensemble: induced environment dimension must be positive");
        }
        break;
    case EnsembleKind::ConstrainedPure: {
        if (env_dim < 1) {
            throw InvalidArgument("ensemble: constrained environment dimension must be positive");
        }
        const Index n = dim * env_dim;
        if (projector.rows() != n || projector.cols() != n) {
            throw InvalidArgument("ensemble: projector is not (d * dim_E) square");
        }
        if ((projector * projector - projector).cwiseAbs().maxCoeff() > 1e-10 ||
            !is_hermitian(projector, 1e-10)) {
            throw InvalidArgument("ensemble: P_R is not an orthogonal projector");
        }
        if (range_dim() < 1) {
            throw InvalidArgument("ensemble: projector has empty range");
        }
        break;
    }
    }
}

Index EnsembleSpec::range_dim() const
{
    return static_cast<Index>(std::llround(projector.trace().real()));
}

std::string EnsembleSpec::name() const
{
    switch (kind) {
    case EnsembleKind::TwoDesign:
        return "two_design";
    case EnsembleKind::HilbertSchmidt:
        return "hilbert_schmidt";
    case EnsembleKind::Induced:
        return "induced";
    case EnsembleKind::ConstrainedPure:
        return "constrained_pure";
    }
    return "unknown";
}

StateSampler::StateSampler(EnsembleSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    if (spec_.kind == EnsembleKind::ConstrainedPure) {
        // Columns of the projector span its range; pivoted QR picks d_R of them.
        Eigen::ColPivHouseholderQR<CMatrix> qr(spec_.projector);
        const Index rank = spec_.range_dim();
        const CMatrix q = qr.householderQ();
        range_basis_ = q.leftCols(rank);
    }
    if (spec_.kind == EnsembleKind::TwoDesign) {
        const Complex c = spec_.reference(0, 0);
        maximally_mixed_reference_ =
            spec_.reference == c * CMatrix::Identity(spec_.dim, spec_.dim);
    }
}

CMatrix StateSampler::sample(std::uint64_t seed) const
{
    Rng rng(seed);
    const Index d = spec_.dim;
    switch (spec_.kind) {
    case EnsembleKind::TwoDesign: {
        if (maximally_mixed_reference_) {
            return spec_.reference;
        }
        const CMatrix u = haar_unitary(d, rng);
        return hermitian_part(u * spec_.reference * u.adjoint());
    }
    case EnsembleKind::HilbertSchmidt:
    case EnsembleKind::Induced: {
        const Index cols = spec_.kind == EnsembleKind::Induced ? spec_.env_dim : d;
        const CMatrix g = ginibre(d, cols, rng);
        CMatrix rho = hermitian_part(g * g.adjoint());
        return rho / rho.trace().real();
    }
    case EnsembleKind::ConstrainedPure: {
        const CVector psi = range_basis_ * haar_vector(range_basis_.cols(), rng);
        const CMatrix full = psi * psi.adjoint();
        CMatrix rho = hermitian_part(partial_trace(full, d, spec_.env_dim, Keep::A));
        return rho / rho.trace().real();
    }
    }
    throw InvalidArgument("ensemble: unknown kind");
}

CMatrix sample_state(const EnsembleSpec& spec, std::uint64_t seed)
{
    return StateSampler(spec).sample(seed);
}

} // namespace relaxtyp

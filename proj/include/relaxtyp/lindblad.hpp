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

#include <optional>
#include <string>
#include <vector>

#include "relaxtyp/matcore.hpp"

namespace relaxtyp {

/// A Lindblad generator: d-dimensional Hamiltonian plus jump operators.
struct LindbladModel {
    Index dim = 0;
    CMatrix hamiltonian;
    std::vector<CMatrix> jumps;
    std::string label;

    /// Throws InvalidArgument unless H is Hermitian to 1e-12 and every jump is d x d.
    void validate() const;
};

enum class Normalization { TraceNorm, HSNorm };

/// Normalized spectral decomposition of a Lindbladian.
///
/// Modes are numbered from 1 (mode 1 is the stationary mode). Eigenvalues are
/// sorted by nonincreasing real part, ties broken by increasing imaginary part.
/// R_k and L_k are biorthonormal, tr(L_j^H R_k) = delta_jk. R_1 is the
/// stationary state and L_1 the identity. For k >= 2 the right eigenmatrix is
/// normalized in the chosen norm and its first largest-magnitude entry (in
/// column-stacking order) is real positive; L_k carries the compensating factor.
///
/// A truncated decomposition keeps only the first `size()` modes of the spectrum
/// (see `DecomposeOptions::max_modes` and `slowest_modes`); `complete()` tells
/// whether every d^2 mode is present.
struct SpectralDecomposition {
    Index d = 0;
    CVector eigenvalues;
    std::vector<CMatrix> right_modes;
    std::vector<CMatrix> left_modes;
    std::vector<double> condition_numbers;
    /// Size of the degeneracy cluster each mode belongs to.
    std::vector<Index> cluster_sizes;
    CMatrix stationary_state;
    Normalization normalization = Normalization::TraceNorm;

    Index size() const { return eigenvalues.size(); }
    bool complete() const { return size() == d * d; }

    Complex eigenvalue(int k) const;
    const CMatrix& right(int k) const;
    const CMatrix& left(int k) const;
    double condition_number(int k) const;
    Index cluster_size(int k) const;
    /// Throws std::out_of_range unless 1 <= k <= size().
    void check_mode(int k) const;
};

struct DecomposeOptions {
    Normalization normalization = Normalization::TraceNorm;
    /// Superoperator commuting with the generator; its eigenvalues select a
    /// basis inside degenerate clusters (for example per-site labels of a
    /// non-interacting chain). Must be d^2 x d^2.
    std::optional<CMatrix> splitter;
    /// Keep only the first max_modes modes (0 keeps all).
    Index max_modes = 0;
    /// Zero-eigenvalue tolerance, relative to max(1, ||L||_2).
    double zero_tol = 1e-9;
};

/// d^2 x d^2 matrix of the generator under column-stacking vectorization:
/// -i(I (x) H - H^T (x) I) + sum_j [conj(J) (x) J - (I (x) J^H J + (J^H J)^T (x) I)/2].
CMatrix build_superoperator(const LindbladModel& model);

/// Heisenberg-picture generator, i[H,O] + sum_j [J^H O J - {J^H J, O}/2], vectorized.
/// Equals the conjugate transpose of `build_superoperator`.
CMatrix build_adjoint_superoperator(const LindbladModel& model);

/// Applies the generator to rho without forming the superoperator.
CMatrix apply_lindbladian(const LindbladModel& model, const CMatrix& rho);

/// Heisenberg-picture counterpart of `apply_lindbladian`.
CMatrix apply_adjoint_lindbladian(const LindbladModel& model, const CMatrix& op);

SpectralDecomposition spectral_decompose(const LindbladModel& model,
                                         Normalization normalization = Normalization::TraceNorm);

SpectralDecomposition spectral_decompose(const LindbladModel& model,
                                         const DecomposeOptions& options);

/// Decomposition of an already assembled superoperator acting on d x d matrices.
SpectralDecomposition decompose_superoperator(const CMatrix& superop, Index d,
                                              const DecomposeOptions& options = {});

/// rho(t) = sum_k exp(lambda_k t) tr(L_k^H rho0) R_k. Requires a complete decomposition.
CMatrix propagate(const SpectralDecomposition& decomp, const CMatrix& rho0, double t);

/// Caches the overlaps of one initial state so repeated propagation is cheap.
class SpectralPropagator {
public:
    SpectralPropagator(const SpectralDecomposition& decomp, const CMatrix& rho0);

    CMatrix state(double t) const;
    /// || rho(t) - rho_ss ||_1
    double distance_to_stationary(double t) const;

private:
    const SpectralDecomposition* decomp_;
    CVector overlaps_;
};

/// First-order eigenvalue shift <vec L_k, delta vec R_k> for a d^2 x d^2 perturbation.
/// Throws DegenerateMode when mode k belongs to a cluster of size > 1.
Complex perturb_eigenvalue(const SpectralDecomposition& decomp, const CMatrix& delta, int k);

/// Rescales every R_k (k >= 2) to the requested norm; L_k is adjusted inversely.
void renormalize(SpectralDecomposition& decomp, Normalization normalization);

/// Phase-and-norm convention for one mode pair, shared with the analytic oracles.
void normalize_mode(CMatrix& right, CMatrix& left, Normalization normalization);

/// Sorts eigenvalue indices: real part descending (ties within tol), then imaginary ascending.
std::vector<Index> spectral_order(const CVector& values, double tol);

} // namespace relaxtyp

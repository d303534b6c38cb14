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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace relaxtyp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Raw eigenpairs of a square matrix.
///
/// Column k of `right_vectors` satisfies m v_k = values[k] v_k and column k of
/// `left_vectors` satisfies m^H w_k = conj(values[k]) w_k. The left vectors are
/// taken from the inverse of the right-vector matrix, so w_j^H v_k = delta_jk
/// holds to inversion accuracy.
struct EigenSystem {
    CVector values;
    CMatrix right_vectors;
    CMatrix left_vectors;
    /// Size of the degeneracy cluster each eigenvalue belongs to.
    std::vector<Index> cluster_sizes;
    /// Cluster label per eigenvalue; equal labels mean the same cluster.
    std::vector<Index> cluster_ids;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Keep { A, B };

/// Partial trace over one factor of a bipartite operator on C^{dim_a} (x) C^{dim_b}.
/// The A factor is the leftmost in Kronecker order.
CMatrix partial_trace(const CMatrix& x, Index dim_a, Index dim_b, Keep keep);

struct SchattenNorms {
    double trace_norm = 0.0;
    double hs_norm = 0.0;
    double op_norm = 0.0;
};

/// Trace, Hilbert-Schmidt and operator norms from a singular value decomposition.
SchattenNorms schatten_norms(const CMatrix& a);

double trace_norm(const CMatrix& a);

/// Trace norm of a Hermitian matrix from its eigenvalues (cheaper than an SVD).
double hermitian_trace_norm(const CMatrix& a);

/// Power-iteration estimate of the largest singular value.
double spectral_norm_estimate(const CMatrix& a, int iterations = 60);

/// Tolerance options for `eig_general`.
struct EigOptions {
    /// Eigenvalues closer than cluster_tol * ||m||_2 form one cluster.
    double cluster_tol = 1e-8;
    /// Minimum singular value of the left/right overlap of a cluster.
    double defect_tol = 1e-10;
};

/// General (non-Hermitian) eigendecomposition backed by LAPACK zgeev.
///
/// Degenerate clusters are replaced by a canonical basis of the eigenspace:
/// rows are pivoted greedily by their weight in the eigenspace and the basis is
/// reduced so the pivot rows form the identity. For a subspace spanned by
/// vectors with disjoint supports this recovers exactly those vectors.
/// Throws NonDiagonalizable if a cluster has defective rank.
EigenSystem eig_general(const CMatrix& m, const EigOptions& options = {});

/// Eigenvalues only (zgeev without vectors).
CVector eigenvalues_general(const CMatrix& m);

/// Numerical radius w(a) = max_theta lambda_max[(e^{-i theta} a + e^{i theta} a^H)/2].
///
/// Scans a uniform theta grid and refines the best bracket with golden-section search.
double numerical_radius(const CMatrix& a, int theta_grid = 256, double refine_tol = 1e-10);

bool is_hermitian(const CMatrix& a, double tol);

/// Hermitian, unit trace and positive semidefinite up to tol.
bool is_density_matrix(const CMatrix& rho, double tol);

/// (a + a^H) / 2
CMatrix hermitian_part(const CMatrix& a);

/// Column-stacking vectorization. The inverse is `unvec`.
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Index d);

} // namespace relaxtyp

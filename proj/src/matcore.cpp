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

#include "relaxtyp/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>

#include "lapack.hpp"
#include "relaxtyp/errors.hpp"

namespace relaxtyp {

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix partial_trace(const CMatrix& x, Index dim_a, Index dim_b, Keep keep)
{
    if (dim_a < 1 || dim_b < 1 || x.rows() != dim_a * dim_b || x.cols() != dim_a * dim_b) {
        throw InvalidArgument("partial_trace: operator is not (dim_a*dim_b) square");
    }
    if (keep == Keep::A) {
        CMatrix out = CMatrix::Zero(dim_a, dim_a);
        for (Index a2 = 0; a2 < dim_a; ++a2) {
            for (Index a1 = 0; a1 < dim_a; ++a1) {
                Complex s = 0.0;
                for (Index b = 0; b < dim_b; ++b) {
                    s += x(a1 * dim_b + b, a2 * dim_b + b);
                }
                out(a1, a2) = s;
            }
        }
        return out;
    }
    CMatrix out = CMatrix::Zero(dim_b, dim_b);
    for (Index a = 0; a < dim_a; ++a) {
        out += x.block(a * dim_b, a * dim_b, dim_b, dim_b);
    }
    return out;
}

SchattenNorms schatten_norms(const CMatrix& a)
{
    if (a.size() == 0) {
        return {};
    }
    Eigen::BDCSVD<CMatrix> svd(a);
    const Eigen::VectorXd& s = svd.singularValues();
    return {s.sum(), s.norm(), s.maxCoeff()};
}

double trace_norm(const CMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues().sum();
}

double hermitian_trace_norm(const CMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double spectral_norm_estimate(const CMatrix& a, int iterations)
{
    if (a.size() == 0) {
        return 0.0;
    }
    // Deterministic start vector with no special alignment to the basis.
    CVector x(a.cols());
    for (Index i = 0; i < x.size(); ++i) {
        x(i) = Complex(1.0 + 0.1 * std::sin(1.3 * double(i)), 0.05 * std::cos(0.7 * double(i)));
    }
    x.normalize();
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        CVector y = a * x;
        CVector z = a.adjoint() * y;
        const double nz = z.norm();
        if (nz == 0.0) {
            return 0.0;
        }
        sigma = std::sqrt(nz);
        x = z / nz;
    }
    return std::max(sigma, (a * x).norm());
}

namespace {

struct DisjointSets {
    std::vector<Index> parent;
    explicit DisjointSets(Index n) : parent(static_cast<size_t>(n))
    {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index i)
    {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(Index a, Index b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

CMatrix orthonormal_columns(const CMatrix& a, double rank_tol, bool& full_rank)
{
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    full_rank = s.size() > 0 && s(s.size() - 1) > rank_tol * s(0);
    return svd.matrixU();
}

// Pivot rows greedily by their residual weight in the subspace, then reduce the
// basis so that the pivot rows become the identity. Independent of the input
// basis up to exact ties.
CMatrix canonical_basis(const CMatrix& q)
{
    const Index m = q.cols();
    Eigen::ColPivHouseholderQR<CMatrix> qr(q.transpose());
    const auto& perm = qr.colsPermutation().indices();
    CMatrix pivots(m, m);
    for (Index r = 0; r < m; ++r) {
        pivots.row(r) = q.row(perm(r));
    }
    CMatrix basis = q * pivots.partialPivLu().inverse();
    for (Index c = 0; c < m; ++c) {
        basis.col(c).normalize();
    }
    return basis;
}

} // namespace

CVector eigenvalues_general(const CMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw InvalidArgument("eigenvalues_general: matrix is not square");
    }
    const lapack_int n = static_cast<lapack_int>(m.rows());
    CMatrix a = m;
    CVector w(n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(),
                                          nullptr, n, nullptr, n);
    if (info != 0) {
        throw NumericalError("zgeev failed with info = " + std::to_string(info));
    }
    return w;
}

EigenSystem eig_general(const CMatrix& m, const EigOptions& options)
{
    if (m.rows() != m.cols()) {
        throw InvalidArgument("eig_general: matrix is not square");
    }
    const lapack_int n = static_cast<lapack_int>(m.rows());
    EigenSystem out;
    if (n == 0) {
        return out;
    }
    CMatrix a = m;
    CVector w(n);
    CMatrix vl(n, n);
    CMatrix vr(n, n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', n, a.data(), n, w.data(),
                                          vl.data(), n, vr.data(), n);
    if (info != 0) {
        throw NumericalError("zgeev failed with info = " + std::to_string(info));
    }

    const double scale = std::max(spectral_norm_estimate(m), 1e-300);
    const double tol = options.cluster_tol * scale;

    std::vector<Index> by_real(static_cast<size_t>(n));
    std::iota(by_real.begin(), by_real.end(), Index{0});
    std::sort(by_real.begin(), by_real.end(),
              [&](Index i, Index j) { return w(i).real() < w(j).real(); });
    DisjointSets sets(n);
    for (size_t p = 0; p < by_real.size(); ++p) {
        for (size_t q = p + 1; q < by_real.size(); ++q) {
            const Index i = by_real[p];
            const Index j = by_real[q];
            if (w(j).real() - w(i).real() > tol) {
                break;
            }
            if (std::abs(w(i) - w(j)) <= tol) {
                sets.unite(i, j);
            }
        }
    }

    std::vector<std::vector<Index>> clusters;
    std::vector<Index> cluster_of(static_cast<size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        const Index root = sets.find(i);
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<Index>(clusters.size());
            clusters.emplace_back();
        }
        cluster_of[i] = cluster_of[root];
        clusters[cluster_of[i]].push_back(i);
    }

    for (Index c = 0; c < n; ++c) {
        vr.col(c).normalize();
        vl.col(c).normalize();
    }

    out.cluster_sizes.assign(static_cast<size_t>(n), 1);
    out.cluster_ids.assign(static_cast<size_t>(n), 0);
    for (size_t c = 0; c < clusters.size(); ++c) {
        const auto& members = clusters[c];
        const Index size = static_cast<Index>(members.size());
        for (Index i : members) {
            out.cluster_sizes[i] = size;
            out.cluster_ids[i] = static_cast<Index>(c);
        }
        if (size == 1) {
            const Index i = members.front();
            if (std::abs(vl.col(i).dot(vr.col(i))) < options.defect_tol) {
                throw NonDiagonalizable("eig_general: vanishing left/right overlap at eigenvalue " +
                                        std::to_string(w(i).real()) + "+" +
                                        std::to_string(w(i).imag()) + "i");
            }
            continue;
        }
        CMatrix right(n, size);
        CMatrix left(n, size);
        for (Index k = 0; k < size; ++k) {
            right.col(k) = vr.col(members[k]);
            left.col(k) = vl.col(members[k]);
        }
        bool right_full = false;
        bool left_full = false;
        const CMatrix qr = orthonormal_columns(right, options.defect_tol, right_full);
        const CMatrix ql = orthonormal_columns(left, options.defect_tol, left_full);
        Eigen::JacobiSVD<CMatrix> overlap(ql.adjoint() * qr);
        const double min_overlap = overlap.singularValues().minCoeff();
        if (!right_full || !left_full || min_overlap < options.defect_tol) {
            throw NonDiagonalizable("eig_general: defective cluster of size " +
                                    std::to_string(size) + " near eigenvalue " +
                                    std::to_string(w(members.front()).real()) + "+" +
                                    std::to_string(w(members.front()).imag()) + "i");
        }
        const CMatrix basis = canonical_basis(qr);
        for (Index k = 0; k < size; ++k) {
            vr.col(members[k]) = basis.col(k);
        }
    }

    Eigen::PartialPivLU<CMatrix> lu(vr);
    out.left_vectors = lu.inverse().adjoint();
    out.right_vectors = std::move(vr);
    out.values = std::move(w);
    return out;
}

double numerical_radius(const CMatrix& a, int theta_grid, double refine_tol)
{
    if (a.rows() != a.cols()) {
        throw InvalidArgument("numerical_radius: matrix is not square");
    }
    if (theta_grid < 64) {
        throw InvalidArgument("numerical_radius: theta_grid must be at least 64");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    const CMatrix ah = a.adjoint();
    auto top = [&](double theta) {
        const Complex phase = std::polar(1.0, -theta);
        const CMatrix h = 0.5 * (phase * a + std::conj(phase) * ah);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(es.eigenvalues().size() - 1);
    };

    const double step = 2.0 * std::numbers::pi / theta_grid;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < theta_grid; ++j) {
        const double v = top(j * step);
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }

    // Golden-section search for the maximum inside the bracketing grid cells.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = top(x1);
    double f2 = top(x2);
    while (hi - lo > refine_tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = top(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = top(x1);
        }
    }
    return std::max({best_value, f1, f2});
}

bool is_hermitian(const CMatrix& a, double tol)
{
    return a.rows() == a.cols() && (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_density_matrix(const CMatrix& rho, double tol)
{
    if (rho.rows() == 0 || !is_hermitian(rho, tol)) {
        return false;
    }
    if (std::abs(rho.trace() - 1.0) > tol) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

CMatrix hermitian_part(const CMatrix& a)
{
    return 0.5 * (a + a.adjoint());
}

CVector vec(const CMatrix& a)
{
    return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, Index d)
{
    if (v.size() != d * d) {
        throw InvalidArgument("unvec: vector length is not d^2");
    }
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

} // namespace relaxtyp

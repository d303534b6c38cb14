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

#include "relaxtyp/slowest_modes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "relaxtyp/ensembles.hpp"
#include "relaxtyp/errors.hpp"

namespace relaxtyp {

namespace {

using Apply = std::function<CMatrix(const CMatrix&)>;

struct RitzResult {
    CVector values;
    /// Columns are vectorized Ritz vectors, sorted by decreasing real part.
    CMatrix vectors;
};

CMatrix orthonormalize(const CMatrix& x)
{
    Eigen::HouseholderQR<CMatrix> qr(x);
    return qr.householderQ() * CMatrix::Identity(x.rows(), x.cols());
}

RitzResult thick_restart_arnoldi(const Apply& op, Index d, double norm,
                                 const SlowestModesOptions& o)
{
    const Index n = d * d;
    const Index keep = std::min(n, o.n_modes + o.guard);
    const Index max_dim = std::min(n, std::max(keep + 10, o.krylov_dim));
    auto apply_vec = [&](const CVector& v) { return vec(op(unvec(v, d))); };

    Rng rng(o.seed);
    CMatrix basis = orthonormalize(ginibre(n, 1, rng));
    CMatrix image(n, 0);
    CVector next = basis.col(0);
    RitzResult out;
    for (int restart = 0; restart < o.max_restarts; ++restart) {
        // Expand with a Krylov chain from `next`, keeping L applied to every basis vector.
        while (basis.cols() < max_dim) {
            if (image.cols() < basis.cols()) {
                image.conservativeResize(n, image.cols() + 1);
                image.col(image.cols() - 1) = apply_vec(basis.col(image.cols() - 1));
                next = image.col(image.cols() - 1);
            }
            for (int pass = 0; pass < 2; ++pass) {
                next -= basis * (basis.adjoint() * next);
            }
            const double nn = next.norm();
            if (nn < 1e-13 * norm) {
                next = ginibre(n, 1, rng).col(0);
                continue;
            }
            basis.conservativeResize(n, basis.cols() + 1);
            basis.col(basis.cols() - 1) = next / nn;
        }
        if (image.cols() < basis.cols()) {
            image.conservativeResize(n, basis.cols());
            image.col(basis.cols() - 1) = apply_vec(basis.col(basis.cols() - 1));
        }

        Eigen::ComplexEigenSolver<CMatrix> ces(basis.adjoint() * image);
        const Index m = basis.cols();
        std::vector<Index> order(static_cast<size_t>(m));
        std::iota(order.begin(), order.end(), Index{0});
        std::sort(order.begin(), order.end(), [&](Index a, Index b) {
            return ces.eigenvalues()(a).real() > ces.eigenvalues()(b).real();
        });
        out.values.resize(o.n_modes);
        out.vectors.resize(n, o.n_modes);
        double worst = 0.0;
        CVector worst_residual;
        for (Index k = 0; k < o.n_modes; ++k) {
            const Index c = order[static_cast<size_t>(k)];
            const CVector y = ces.eigenvectors().col(c);
            const CVector x = basis * y;
            const double xn = x.norm();
            const Complex mu = ces.eigenvalues()(c);
            const CVector residual = (image * y - mu * x) / xn;
            const double rn = residual.norm();
            if (rn >= worst) {
                worst = rn;
                worst_residual = residual;
            }
            out.values(k) = mu;
            out.vectors.col(k) = x / xn;
        }
        if (worst <= o.tol * norm) {
            return out;
        }
        // Restart on the leading Ritz vectors and continue from the worst residual.
        CMatrix ritz(n, keep);
        for (Index k = 0; k < keep; ++k) {
            ritz.col(k) = basis * ces.eigenvectors().col(order[static_cast<size_t>(k)]);
        }
        basis = orthonormalize(ritz);
        image.resize(n, keep);
        for (Index k = 0; k < keep; ++k) {
            image.col(k) = apply_vec(basis.col(k));
        }
        next = worst_residual;
    }
    throw NumericalError("slowest_modes: Arnoldi did not converge in " +
                         std::to_string(o.max_restarts) + " restarts");
}

} // namespace

SpectralDecomposition slowest_modes(const LindbladModel& model, const SlowestModesOptions& options)
{
    model.validate();
    const Index d = model.dim;
    if (options.n_modes < 1 || options.n_modes > d * d) {
        throw InvalidArgument("slowest_modes: n_modes must lie in 1..d^2");
    }
    // ||L|| <= 2||H|| + 2 sum ||J||^2 in operator norm.
    double norm = 2.0 * model.hamiltonian.norm();
    for (const auto& j : model.jumps) {
        norm += 2.0 * j.squaredNorm();
    }
    norm = std::max(norm, 1e-12);

    const RitzResult right = thick_restart_arnoldi(
        [&](const CMatrix& x) { return apply_lindbladian(model, x); }, d, norm, options);
    SlowestModesOptions left_options = options;
    left_options.n_modes = std::min(d * d, options.n_modes + options.guard / 2);
    const RitzResult left = thick_restart_arnoldi(
        [&](const CMatrix& x) { return apply_adjoint_lindbladian(model, x); }, d, norm,
        left_options);

    const Index m = options.n_modes;
    const double tol = 1e-6 * norm;
    if (std::abs(right.values(0)) > tol) {
        throw NumericalError("slowest_modes: leading Ritz value is not zero");
    }
    if (m > 1 && std::abs(right.values(1)) <= tol) {
        throw DegenerateSteadyState("slowest_modes: more than one zero eigenvalue");
    }

    // Pair right and left Ritz vectors cluster by cluster and biorthogonalize.
    CMatrix w(d * d, m);
    std::vector<Index> cluster_size(static_cast<size_t>(m), 1);
    std::vector<bool> used(static_cast<size_t>(left.values.size()), false);
    for (Index start = 0; start < m;) {
        Index end = start + 1;
        while (end < m && std::abs(right.values(end) - right.values(start)) <= tol) {
            ++end;
        }
        const Index size = end - start;
        CMatrix wl(d * d, size);
        for (Index k = 0; k < size; ++k) {
            Index best = -1;
            double best_dist = 0.0;
            for (Index c = 0; c < left.values.size(); ++c) {
                const double dist = std::abs(std::conj(left.values(c)) - right.values(start + k));
                if (!used[static_cast<size_t>(c)] && (best < 0 || dist < best_dist)) {
                    best = c;
                    best_dist = dist;
                }
            }
            if (best < 0 || best_dist > tol) {
                throw NumericalError("slowest_modes: no left partner for a right Ritz vector");
            }
            used[static_cast<size_t>(best)] = true;
            wl.col(k) = left.vectors.col(best);
        }
        const CMatrix vr = right.vectors.middleCols(start, size);
        const CMatrix overlap = wl.adjoint() * vr;
        Eigen::FullPivLU<CMatrix> lu(overlap);
        if (!lu.isInvertible()) {
            throw NonDiagonalizable("slowest_modes: singular left/right overlap");
        }
        w.middleCols(start, size) = wl * lu.inverse().adjoint();
        for (Index k = start; k < end; ++k) {
            cluster_size[static_cast<size_t>(k)] = size;
        }
        start = end;
    }

    std::vector<Index> order{0};
    if (m > 1) {
        for (Index p : spectral_order(right.values.tail(m - 1), 1e-8 * norm)) {
            order.push_back(p + 1);
        }
    }
    SpectralDecomposition out;
    out.d = d;
    out.normalization = options.normalization;
    out.eigenvalues.resize(m);
    for (Index p = 0; p < m; ++p) {
        const Index i = order[static_cast<size_t>(p)];
        CMatrix r = unvec(right.vectors.col(i), d);
        CMatrix l = unvec(w.col(i), d);
        if (p == 0) {
            const Complex t = r.trace();
            r /= t;
            l *= std::conj(t);
            r = hermitian_part(r);
            out.stationary_state = r;
            out.eigenvalues(p) = 0.0;
        } else {
            normalize_mode(r, l, options.normalization);
            out.eigenvalues(p) = right.values(i);
        }
        out.condition_numbers.push_back(r.norm() * l.norm());
        out.cluster_sizes.push_back(cluster_size[static_cast<size_t>(i)]);
        out.right_modes.push_back(std::move(r));
        out.left_modes.push_back(std::move(l));
    }
    return out;
}

} // namespace relaxtyp

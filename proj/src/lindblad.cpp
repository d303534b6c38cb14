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

#include "relaxtyp/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "relaxtyp/errors.hpp"

namespace relaxtyp {

void LindbladModel::validate() const
{
    if (dim < 1) {
        throw InvalidArgument("LindbladModel: dimension must be positive");
    }
    if (hamiltonian.rows() != dim || hamiltonian.cols() != dim) {
        throw InvalidArgument("LindbladModel: Hamiltonian is not d x d");
    }
    if (!is_hermitian(hamiltonian, 1e-12)) {
        throw InvalidArgument("LindbladModel: Hamiltonian is not Hermitian");
    }
    for (size_t j = 0; j < jumps.size(); ++j) {
        if (jumps[j].rows() != dim || jumps[j].cols() != dim) {
            throw InvalidArgument("LindbladModel: jump " + std::to_string(j) + " is not d x d");
        }
    }
}

void SpectralDecomposition::check_mode(int k) const
{
    if (k < 1 || k > size()) {
        throw std::out_of_range("mode index " + std::to_string(k) + " outside 1.." +
                                std::to_string(size()));
    }
}

Complex SpectralDecomposition::eigenvalue(int k) const
{
    check_mode(k);
    return eigenvalues(k - 1);
}

const CMatrix& SpectralDecomposition::right(int k) const
{
    check_mode(k);
    return right_modes[k - 1];
}

const CMatrix& SpectralDecomposition::left(int k) const
{
    check_mode(k);
    return left_modes[k - 1];
}

double SpectralDecomposition::condition_number(int k) const
{
    check_mode(k);
    return condition_numbers[k - 1];
}

Index SpectralDecomposition::cluster_size(int k) const
{
    check_mode(k);
    return cluster_sizes[k - 1];
}

namespace {

// out += alpha * kron(a, b), skipping structural zeros of a.
void add_kron(CMatrix& out, Complex alpha, const CMatrix& a, const CMatrix& b)
{
    const Index br = b.rows();
    const Index bc = b.cols();
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            const Complex s = alpha * a(i, j);
            if (s != Complex(0.0)) {
                out.block(i * br, j * bc, br, bc) += s * b;
            }
        }
    }
}

} // namespace

CMatrix build_superoperator(const LindbladModel& model)
{
    model.validate();
    const Index d = model.dim;
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix out = CMatrix::Zero(d * d, d * d);
    const Complex i1(0.0, 1.0);
    add_kron(out, -i1, id, model.hamiltonian);
    add_kron(out, i1, model.hamiltonian.transpose(), id);
    for (const auto& jump : model.jumps) {
        const CMatrix jj = jump.adjoint() * jump;
        add_kron(out, 1.0, jump.conjugate(), jump);
        add_kron(out, -0.5, id, jj);
        add_kron(out, -0.5, jj.transpose(), id);
    }
    return out;
}

CMatrix build_adjoint_superoperator(const LindbladModel& model)
{
    model.validate();
    const Index d = model.dim;
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix out = CMatrix::Zero(d * d, d * d);
    const Complex i1(0.0, 1.0);
    add_kron(out, i1, id, model.hamiltonian);
    add_kron(out, -i1, model.hamiltonian.transpose(), id);
    for (const auto& jump : model.jumps) {
        const CMatrix jj = jump.adjoint() * jump;
        add_kron(out, 1.0, jump.transpose(), jump.adjoint());
        add_kron(out, -0.5, id, jj);
        add_kron(out, -0.5, jj.transpose(), id);
    }
    return out;
}

CMatrix apply_lindbladian(const LindbladModel& model, const CMatrix& rho)
{
    const Complex i1(0.0, 1.0);
    CMatrix out = -i1 * (model.hamiltonian * rho - rho * model.hamiltonian);
    for (const auto& jump : model.jumps) {
        const CMatrix jj = jump.adjoint() * jump;
        out += jump * rho * jump.adjoint() - 0.5 * (jj * rho + rho * jj);
    }
    return out;
}

CMatrix apply_adjoint_lindbladian(const LindbladModel& model, const CMatrix& op)
{
    const Complex i1(0.0, 1.0);
    CMatrix out = i1 * (model.hamiltonian * op - op * model.hamiltonian);
    for (const auto& jump : model.jumps) {
        const CMatrix jj = jump.adjoint() * jump;
        out += jump.adjoint() * op * jump - 0.5 * (jj * op + op * jj);
    }
    return out;
}

std::vector<Index> spectral_order(const CVector& values, double tol)
{
    std::vector<Index> order(static_cast<size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values(a).real() > values(b).real(); });
    // Real parts within tol of the first member of a run count as equal.
    size_t start = 0;
    while (start < order.size()) {
        size_t end = start + 1;
        while (end < order.size() &&
               values(order[start]).real() - values(order[end]).real() <= tol) {
            ++end;
        }
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                             return values(a).imag() < values(b).imag();
                         });
        start = end;
    }
    return order;
}

void normalize_mode(CMatrix& right, CMatrix& left, Normalization normalization)
{
    const double peak = right.cwiseAbs().maxCoeff();
    if (peak == 0.0) {
        throw NumericalError("normalize_mode: zero eigenmatrix");
    }
    Complex phase = 1.0;
    for (Index i = 0; i < right.size(); ++i) {
        const Complex z = right.data()[i];
        if (std::abs(z) >= (1.0 - 1e-8) * peak) {
            phase = z / std::abs(z);
            break;
        }
    }
    const double norm =
        normalization == Normalization::TraceNorm ? trace_norm(right) : right.norm();
    const Complex s = phase * norm;
    right /= s;
    left *= std::conj(s);
}

void renormalize(SpectralDecomposition& decomp, Normalization normalization)
{
    for (Index k = 1; k < decomp.size(); ++k) {
        normalize_mode(decomp.right_modes[k], decomp.left_modes[k], normalization);
        decomp.condition_numbers[k] = decomp.right_modes[k].norm() * decomp.left_modes[k].norm();
    }
    decomp.normalization = normalization;
}

SpectralDecomposition spectral_decompose(const LindbladModel& model, Normalization normalization)
{
    DecomposeOptions options;
    options.normalization = normalization;
    return spectral_decompose(model, options);
}

SpectralDecomposition spectral_decompose(const LindbladModel& model,
                                         const DecomposeOptions& options)
{
    return decompose_superoperator(build_superoperator(model), model.dim, options);
}

SpectralDecomposition decompose_superoperator(const CMatrix& superop, Index d,
                                              const DecomposeOptions& options)
{
    if (d < 1 || superop.rows() != d * d || superop.cols() != d * d) {
        throw InvalidArgument("decompose_superoperator: superoperator is not d^2 x d^2");
    }
    if (options.splitter && (options.splitter->rows() != d * d || options.splitter->cols() != d * d)) {
        throw InvalidArgument("decompose_superoperator: splitter is not d^2 x d^2");
    }
    const EigOptions eig_options;
    EigenSystem es = eig_general(superop, eig_options);
    const Index n = es.values.size();
    const double scale = std::max(1.0, spectral_norm_estimate(superop));

    std::vector<Index> zeros;
    for (Index i = 0; i < n; ++i) {
        if (std::abs(es.values(i)) < options.zero_tol * scale) {
            zeros.push_back(i);
        }
    }
    if (zeros.empty()) {
        throw NumericalError("decompose_superoperator: no eigenvalue at zero");
    }
    if (zeros.size() > 1) {
        throw DegenerateSteadyState("decompose_superoperator: " + std::to_string(zeros.size()) +
                                    " eigenvalues at zero (multistable generator)");
    }
    const Index zero = zeros.front();

    // Resolve degenerate clusters with the commuting splitter.
    std::vector<Complex> split_key(static_cast<size_t>(n), Complex(0.0));
    if (options.splitter) {
        std::vector<std::vector<Index>> members;
        std::vector<Index> slot(static_cast<size_t>(n), -1);
        for (Index i = 0; i < n; ++i) {
            const Index c = es.cluster_ids[i];
            if (c >= static_cast<Index>(slot.size()) || slot[c] < 0) {
                slot[c] = static_cast<Index>(members.size());
                members.emplace_back();
            }
            members[slot[c]].push_back(i);
        }
        for (const auto& cluster : members) {
            const Index m = static_cast<Index>(cluster.size());
            if (m == 1) {
                split_key[cluster.front()] = es.left_vectors.col(cluster.front()).dot(
                    *options.splitter * es.right_vectors.col(cluster.front()));
                continue;
            }
            CMatrix vr(n, m);
            CMatrix vl(n, m);
            for (Index c = 0; c < m; ++c) {
                vr.col(c) = es.right_vectors.col(cluster[c]);
                vl.col(c) = es.left_vectors.col(cluster[c]);
            }
            const CMatrix restricted = vl.adjoint() * (*options.splitter) * vr;
            Eigen::ComplexEigenSolver<CMatrix> ces(restricted);
            const CMatrix q = ces.eigenvectors();
            Eigen::FullPivLU<CMatrix> lu(q);
            if (!lu.isInvertible()) {
                throw NumericalError("decompose_superoperator: splitter does not resolve a cluster");
            }
            const CMatrix new_right = vr * q;
            const CMatrix new_left = vl * lu.inverse().adjoint();
            for (Index c = 0; c < m; ++c) {
                es.right_vectors.col(cluster[c]) = new_right.col(c);
                es.left_vectors.col(cluster[c]) = new_left.col(c);
                split_key[cluster[c]] = ces.eigenvalues()(c);
            }
        }
    }

    CVector rest(n - 1);
    std::vector<Index> rest_index;
    rest_index.reserve(static_cast<size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
        if (i != zero) {
            rest(static_cast<Index>(rest_index.size())) = es.values(i);
            rest_index.push_back(i);
        }
    }
    std::vector<Index> order{zero};
    for (Index p : spectral_order(rest, eig_options.cluster_tol * scale)) {
        order.push_back(rest_index[p]);
    }
    // Members of one cluster are ordered by splitter eigenvalue, else by solver index.
    for (size_t start = 1; start < order.size();) {
        size_t end = start + 1;
        while (end < order.size() && es.cluster_ids[order[end]] == es.cluster_ids[order[start]]) {
            ++end;
        }
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                      if (options.splitter) {
                          const Complex ka = split_key[a];
                          const Complex kb = split_key[b];
                          if (std::abs(ka.real() - kb.real()) > 1e-9) {
                              return ka.real() > kb.real();
                          }
                          if (std::abs(ka.imag() - kb.imag()) > 1e-9) {
                              return ka.imag() < kb.imag();
                          }
                      }
                      return a < b;
                  });
        start = end;
    }

    const Index kept = options.max_modes > 0 ? std::min(options.max_modes, n) : n;
    SpectralDecomposition out;
    out.d = d;
    out.normalization = options.normalization;
    out.eigenvalues.resize(kept);
    out.right_modes.reserve(static_cast<size_t>(kept));
    out.left_modes.reserve(static_cast<size_t>(kept));
    for (Index p = 0; p < kept; ++p) {
        const Index i = order[p];
        CMatrix right = unvec(es.right_vectors.col(i), d);
        CMatrix left = unvec(es.left_vectors.col(i), d);
        if (p == 0) {
            const Complex t = right.trace();
            right /= t;
            left *= std::conj(t);
            right = hermitian_part(right);
            out.eigenvalues(p) = Complex(0.0);
            out.stationary_state = right;
        } else {
            normalize_mode(right, left, options.normalization);
            out.eigenvalues(p) = es.values(i);
        }
        out.condition_numbers.push_back(right.norm() * left.norm());
        out.cluster_sizes.push_back(es.cluster_sizes[i]);
        out.right_modes.push_back(std::move(right));
        out.left_modes.push_back(std::move(left));
    }
    return out;
}

SpectralPropagator::SpectralPropagator(const SpectralDecomposition& decomp, const CMatrix& rho0)
    : decomp_(&decomp), overlaps_(decomp.size())
{
    if (!decomp.complete()) {
        throw InvalidArgument("propagation needs a complete decomposition");
    }
    if (rho0.rows() != decomp.d || rho0.cols() != decomp.d) {
        throw InvalidArgument("propagation: initial state has the wrong dimension");
    }
    for (Index k = 0; k < decomp.size(); ++k) {
        overlaps_(k) = decomp.left_modes[k].conjugate().cwiseProduct(rho0).sum();
    }
}

CMatrix SpectralPropagator::state(double t) const
{
    CMatrix out = CMatrix::Zero(decomp_->d, decomp_->d);
    for (Index k = 0; k < decomp_->size(); ++k) {
        const Complex c = std::exp(decomp_->eigenvalues(k) * t) * overlaps_(k);
        if (c != Complex(0.0)) {
            out += c * decomp_->right_modes[k];
        }
    }
    return out;
}

double SpectralPropagator::distance_to_stationary(double t) const
{
    return hermitian_trace_norm(state(t) - decomp_->stationary_state);
}

CMatrix propagate(const SpectralDecomposition& decomp, const CMatrix& rho0, double t)
{
    if (t < 0.0) {
        throw InvalidArgument("propagate: negative time");
    }
    return SpectralPropagator(decomp, rho0).state(t);
}

Complex perturb_eigenvalue(const SpectralDecomposition& decomp, const CMatrix& delta, int k)
{
    decomp.check_mode(k);
    const Index n = decomp.d * decomp.d;
    if (delta.rows() != n || delta.cols() != n) {
        throw InvalidArgument("perturb_eigenvalue: perturbation is not d^2 x d^2");
    }
    if (decomp.cluster_size(k) > 1) {
        throw DegenerateMode("perturb_eigenvalue: mode " + std::to_string(k) +
                             " lies in a degenerate cluster of size " +
                             std::to_string(decomp.cluster_size(k)));
    }
    return vec(decomp.left(k)).dot(delta * vec(decomp.right(k)));
}

} // namespace relaxtyp

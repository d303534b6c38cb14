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

#include "relaxtyp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relaxtyp/ensembles.hpp"
#include "relaxtyp/errors.hpp"

namespace relaxtyp {

CMatrix pauli_x()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix pauli_y()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = Complex(0.0, -1.0);
    m(1, 0) = Complex(0.0, 1.0);
    return m;
}

CMatrix pauli_z()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

CMatrix sigma_minus()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

CMatrix sigma_plus()
{
    return sigma_minus().transpose();
}

CMatrix site_operator(const CMatrix& op, int site, int n)
{
    if (site < 0 || site >= n) {
        throw InvalidArgument("site_operator: site " + std::to_string(site) + " outside chain");
    }
    const Index left = Index{1} << site;
    const Index right = Index{1} << (n - site - 1);
    return kron(kron(CMatrix::Identity(left, left), op), CMatrix::Identity(right, right));
}

void ChainParams::validate() const
{
    if (n < 1) {
        throw InvalidArgument("chain: N must be at least 1");
    }
    if (n > 12) {
        throw InvalidArgument("chain: N = " + std::to_string(n) + " is beyond dense storage");
    }
    if (gamma0 < 0.0 || gamma1 < 0.0 || gamma_dephasing < 0.0) {
        throw InvalidArgument("chain: rates must be nonnegative");
    }
    if (!(gamma0 + gamma1 > 0.0)) {
        throw InvalidArgument("chain: gamma0 + gamma1 must be positive");
    }
}

namespace {

LindbladModel weighted_chain(const ChainParams& p, const std::vector<double>& weights)
{
    p.validate();
    LindbladModel m;
    m.dim = Index{1} << p.n;
    m.hamiltonian = CMatrix::Zero(m.dim, m.dim);
    for (int i = 0; i < p.n; ++i) {
        const double c = weights[static_cast<size_t>(i)];
        m.hamiltonian += c * 0.5 * p.energy * site_operator(pauli_z(), i, p.n);
        if (p.gamma1 > 0.0) {
            m.jumps.push_back(std::sqrt(c * p.gamma1) * site_operator(sigma_minus(), i, p.n));
        }
        if (p.gamma0 > 0.0) {
            m.jumps.push_back(std::sqrt(c * p.gamma0) * site_operator(sigma_plus(), i, p.n));
        }
        if (p.gamma_dephasing > 0.0) {
            m.jumps.push_back(std::sqrt(c * p.gamma_dephasing) * site_operator(pauli_z(), i, p.n));
        }
    }
    return m;
}

std::vector<double> site_weights(int n)
{
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
        w.push_back(std::sqrt(static_cast<double>(primes[i % 12])) + i / 12);
    }
    return w;
}

struct QubitMode {
    Complex lambda;
    CMatrix right;
    CMatrix left;
};

// Single damped qubit, modes ordered 0, -G/2 - iE, -G/2 + iE, -G.
std::vector<QubitMode> qubit_modes(const ChainParams& p)
{
    const double total = p.gamma0 + p.gamma1;
    const double half = 0.5 * total + 2.0 * p.gamma_dephasing;
    std::vector<QubitMode> modes(4);
    modes[0].lambda = 0.0;
    modes[0].right = CMatrix::Zero(2, 2);
    modes[0].right(0, 0) = p.gamma1 / total;
    modes[0].right(1, 1) = p.gamma0 / total;
    modes[0].left = CMatrix::Identity(2, 2);
    modes[1].lambda = Complex(-half, -p.energy);
    modes[1].right = sigma_minus();
    modes[1].left = sigma_minus();
    modes[2].lambda = Complex(-half, p.energy);
    modes[2].right = sigma_plus();
    modes[2].left = sigma_plus();
    modes[3].lambda = -total;
    modes[3].right = 0.5 * pauli_z();
    modes[3].left = CMatrix::Zero(2, 2);
    modes[3].left(0, 0) = 2.0 * p.gamma0 / total;
    modes[3].left(1, 1) = -2.0 * p.gamma1 / total;
    return modes;
}

} // namespace

LindbladModel build_chain(const ChainParams& p)
{
    LindbladModel m = weighted_chain(p, std::vector<double>(static_cast<size_t>(p.n), 1.0));
    m.label = "chain(N=" + std::to_string(p.n) + ")";
    return m;
}

CMatrix chain_dephasing_superoperator(const ChainParams& p)
{
    p.validate();
    LindbladModel m;
    m.dim = Index{1} << p.n;
    m.hamiltonian = CMatrix::Zero(m.dim, m.dim);
    for (int i = 0; i < p.n; ++i) {
        if (p.gamma_dephasing > 0.0) {
            m.jumps.push_back(std::sqrt(p.gamma_dephasing) * site_operator(pauli_z(), i, p.n));
        }
    }
    return build_superoperator(m);
}

CMatrix chain_splitter(const ChainParams& p)
{
    return build_superoperator(weighted_chain(p, site_weights(p.n)));
}

double chain_left_norm(const ChainParams& p, const std::vector<int>& labels)
{
    const auto modes = qubit_modes(p);
    double norm = 1.0;
    for (int k : labels) {
        norm *= modes.at(static_cast<size_t>(k - 1)).left.norm();
    }
    return norm;
}

double chain_mean_overlap(const ChainParams& p, const std::vector<int>& labels)
{
    const auto modes = qubit_modes(p);
    double mean = 1.0;
    for (int k : labels) {
        mean *= modes.at(static_cast<size_t>(k - 1)).left.trace().real() / 2.0;
    }
    return mean;
}

ChainOracle analytic_chain_oracle(const ChainParams& p, Normalization normalization)
{
    p.validate();
    if (p.gamma_dephasing != 0.0) {
        throw InvalidArgument("analytic_chain_oracle: dephasing is not covered");
    }
    const auto qubit = qubit_modes(p);
    const auto weights = site_weights(p.n);
    const Index count = Index{1} << (2 * p.n);
    const Index d = Index{1} << p.n;

    std::vector<std::vector<int>> labels(static_cast<size_t>(count));
    CVector values(count);
    std::vector<Complex> split(static_cast<size_t>(count));
    for (Index m = 0; m < count; ++m) {
        auto& lab = labels[static_cast<size_t>(m)];
        Complex lambda = 0.0;
        Complex s = 0.0;
        for (int i = 0; i < p.n; ++i) {
            const int k = static_cast<int>((m >> (2 * (p.n - 1 - i))) & 3);
            lab.push_back(k + 1);
            lambda += qubit[static_cast<size_t>(k)].lambda;
            s += weights[static_cast<size_t>(i)] * qubit[static_cast<size_t>(k)].lambda;
        }
        values(m) = lambda;
        split[static_cast<size_t>(m)] = s;
    }

    // Same ordering rule as the numerical decomposition: stationary mode
    // first, then spectral order, ties broken by the splitter eigenvalue.
    const double tol = 1e-8 * std::max(1.0, values.cwiseAbs().maxCoeff());
    CVector rest = values.tail(count - 1);
    std::vector<Index> order{0};
    for (Index q : spectral_order(rest, tol)) {
        order.push_back(q + 1);
    }
    for (size_t start = 1; start < order.size();) {
        size_t end = start + 1;
        while (end < order.size() && std::abs(values(order[end]) - values(order[start])) <= tol) {
            ++end;
        }
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                      const Complex ka = split[static_cast<size_t>(a)];
                      const Complex kb = split[static_cast<size_t>(b)];
                      if (std::abs(ka.real() - kb.real()) > 1e-9) {
                          return ka.real() > kb.real();
                      }
                      return ka.imag() < kb.imag();
                  });
        start = end;
    }

    ChainOracle out;
    auto& dec = out.decomp;
    dec.d = d;
    dec.normalization = normalization;
    dec.eigenvalues.resize(count);
    for (Index pos = 0; pos < count; ++pos) {
        const Index m = order[static_cast<size_t>(pos)];
        const auto& lab = labels[static_cast<size_t>(m)];
        CMatrix right = CMatrix::Ones(1, 1);
        CMatrix left = CMatrix::Ones(1, 1);
        for (int k : lab) {
            right = kron(right, qubit[static_cast<size_t>(k - 1)].right);
            left = kron(left, qubit[static_cast<size_t>(k - 1)].left);
        }
        if (pos == 0) {
            dec.stationary_state = right;
        } else {
            normalize_mode(right, left, normalization);
        }
        dec.eigenvalues(pos) = values(m);
        dec.condition_numbers.push_back(right.norm() * left.norm());
        Index cluster = 0;
        for (Index q = 0; q < count; ++q) {
            if (std::abs(values(q) - values(m)) <= tol) {
                ++cluster;
            }
        }
        dec.cluster_sizes.push_back(cluster);
        dec.right_modes.push_back(std::move(right));
        dec.left_modes.push_back(std::move(left));
        out.labels.push_back(lab);
    }
    return out;
}

void TFIMParams::validate() const
{
    if (n < 2) {
        throw InvalidArgument("tfim: N must be at least 2");
    }
    if (n > 12) {
        throw InvalidArgument("tfim: N = " + std::to_string(n) + " is beyond dense storage");
    }
    if (gamma < 0.0 || beta < 0.0) {
        throw InvalidArgument("tfim: gamma and beta must be nonnegative");
    }
    if ((gamma0 && *gamma0 < 0.0) || (gamma1 && *gamma1 < 0.0)) {
        throw InvalidArgument("tfim: rates must be nonnegative");
    }
}

Rates tfim_rates(const TFIMParams& p)
{
    const double x = p.beta * p.energy;
    Rates r;
    r.gamma1 = p.gamma1.value_or(2.0 * p.gamma / (1.0 + std::exp(-x)));
    r.gamma0 = p.gamma0.value_or(2.0 * p.gamma / (1.0 + std::exp(x)));
    return r;
}

LindbladModel build_tfim(const TFIMParams& p)
{
    p.validate();
    const Rates r = tfim_rates(p);
    LindbladModel m;
    m.dim = Index{1} << p.n;
    m.hamiltonian = CMatrix::Zero(m.dim, m.dim);
    for (int i = 0; i + 1 < p.n; ++i) {
        m.hamiltonian -= p.j * site_operator(pauli_z(), i, p.n) * site_operator(pauli_z(), i + 1, p.n);
    }
    for (int i = 0; i < p.n; ++i) {
        m.hamiltonian -= p.g * site_operator(pauli_x(), i, p.n);
    }
    for (int i = 0; i < p.n; ++i) {
        if (r.gamma1 > 0.0) {
            m.jumps.push_back(std::sqrt(r.gamma1) * site_operator(sigma_minus(), i, p.n));
        }
        if (r.gamma0 > 0.0) {
            m.jumps.push_back(std::sqrt(r.gamma0) * site_operator(sigma_plus(), i, p.n));
        }
    }
    m.label = "tfim(N=" + std::to_string(p.n) + ")";
    return m;
}

RateProfile symmetric_kms_profile(double gamma, double beta)
{
    return [gamma, beta](double w) { return gamma * std::exp(0.5 * beta * w); };
}

DaviesModel build_davies(const CMatrix& h0, const std::vector<CMatrix>& couplings, double beta,
                         const RateProfile& rate_profile)
{
    const Index d = h0.rows();
    if (d < 1 || h0.cols() != d || !is_hermitian(h0, 1e-12)) {
        throw InvalidArgument("build_davies: H0 must be a Hermitian square matrix");
    }
    if (beta < 0.0) {
        throw InvalidArgument("build_davies: beta must be nonnegative");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h0);
    const Eigen::VectorXd energy = es.eigenvalues();
    const CMatrix& basis = es.eigenvectors();
    const double scale = std::max(1.0, energy.cwiseAbs().maxCoeff());

    // Bin transitions b -> a by w = E_b - E_a.
    struct Transition {
        double w;
        Index a;
        Index b;
    };
    std::vector<Transition> transitions;
    for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
            transitions.push_back({energy(b) - energy(a), a, b});
        }
    }
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& x, const Transition& y) { return x.w < y.w; });
    std::vector<std::vector<Transition>> bins;
    for (const auto& t : transitions) {
        if (bins.empty() || t.w - bins.back().front().w > 1e-9 * scale) {
            bins.emplace_back();
        }
        bins.back().push_back(t);
    }

    DaviesModel out;
    out.h0 = h0;
    out.beta = beta;
    out.energy_range = energy.maxCoeff() - energy.minCoeff();
    Eigen::VectorXd weights = (-beta * (energy.array() - energy.minCoeff())).exp();
    weights /= weights.sum();
    out.rho_beta = hermitian_part(basis * weights.cast<Complex>().asDiagonal() * basis.adjoint());

    for (const auto& bin : bins) {
        double w = 0.0;
        for (const auto& t : bin) {
            w += t.w;
        }
        w /= static_cast<double>(bin.size());
        out.bohr_frequencies.push_back(w);
        const double up = rate_profile(w);
        const double down = rate_profile(-w);
        if (!(up >= 0.0) || !(down >= 0.0)) {
            throw RateProfileViolation("build_davies: negative rate at w = " + std::to_string(w));
        }
        const double expected = std::exp(-beta * w) * up;
        if (std::abs(down - expected) > 1e-9 * std::max({1.0, down, expected})) {
            throw RateProfileViolation("build_davies: gamma(-w) != exp(-beta w) gamma(w) at w = " +
                                       std::to_string(w));
        }
    }

    out.model.dim = d;
    out.model.hamiltonian = h0;
    for (size_t c = 0; c < couplings.size(); ++c) {
        const CMatrix& coupling = couplings[c];
        if (coupling.rows() != d || coupling.cols() != d || !is_hermitian(coupling, 1e-12)) {
            throw InvalidArgument("build_davies: coupling " + std::to_string(c) +
                                  " must be Hermitian and d x d");
        }
        const CMatrix in_basis = basis.adjoint() * coupling * basis;
        for (size_t k = 0; k < bins.size(); ++k) {
            CMatrix block = CMatrix::Zero(d, d);
            for (const auto& t : bins[k]) {
                block(t.a, t.b) = in_basis(t.a, t.b);
            }
            const double rate = rate_profile(out.bohr_frequencies[k]);
            if (block.norm() < 1e-14 || rate == 0.0) {
                continue;
            }
            out.model.jumps.push_back(std::sqrt(rate) * (basis * block * basis.adjoint()));
        }
    }
    out.model.label = "davies";
    out.model.validate();
    out.dissipator = out.model;
    out.dissipator.hamiltonian = CMatrix::Zero(d, d);
    return out;
}

DaviesModel random_davies(int n_qubits, double beta, std::uint64_t seed, double gamma)
{
    if (n_qubits < 1 || n_qubits > 6) {
        throw InvalidArgument("random_davies: qubit count must be in 1..6");
    }
    const Index d = Index{1} << n_qubits;
    Rng rng(seed);
    const CMatrix g = ginibre(d, d, rng);
    const CMatrix h0 = hermitian_part(g);
    std::vector<CMatrix> couplings;
    for (int i = 0; i < n_qubits; ++i) {
        couplings.push_back(site_operator(pauli_x(), i, n_qubits));
        couplings.push_back(site_operator(pauli_z(), i, n_qubits));
    }
    return build_davies(h0, couplings, beta, symmetric_kms_profile(gamma, beta));
}

namespace {

double projection_residual(const CMatrix& target, const CMatrix& direction)
{
    const double dn = direction.squaredNorm();
    if (dn == 0.0) {
        return 1.0;
    }
    const Complex c = direction.conjugate().cwiseProduct(target).sum() / dn;
    return (target - c * direction).norm() / target.norm();
}

} // namespace

QdbReport qdb_bound_check(const DaviesModel& model, const SpectralDecomposition& decomp,
                          bool throw_on_violation)
{
    const Index d = model.model.dim;
    if (decomp.d != d) {
        throw InvalidArgument("qdb_bound_check: decomposition dimension mismatch");
    }
    QdbReport r;
    r.bound = std::exp(0.5 * model.beta * model.energy_range);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(model.rho_beta);
    const Eigen::VectorXd p = es.eigenvalues();
    if (p.minCoeff() <= 0.0) {
        throw NumericalError("qdb_bound_check: Gibbs state is not full rank");
    }
    const CMatrix& u = es.eigenvectors();
    auto power = [&](double e) {
        return CMatrix(u * p.array().pow(e).matrix().cast<Complex>().asDiagonal() * u.adjoint());
    };
    const CMatrix sqrt_rho = power(0.5);
    const CMatrix inv_sqrt_rho = power(-0.5);
    const CMatrix inv_rho = power(-1.0);
    const CMatrix id = CMatrix::Identity(d, d);

    const CMatrix diss = build_superoperator(model.dissipator);
    const double scale = std::max(1e-300, diss.norm());
    const CMatrix g = kron(sqrt_rho.transpose(), sqrt_rho);
    const CMatrix g_inv = kron(inv_sqrt_rho.transpose(), inv_sqrt_rho);
    r.kms_residual = (diss - g * diss.adjoint() * g_inv).norm() / scale;
    const CMatrix gamma = kron(model.rho_beta.transpose(), id);
    const CMatrix gamma_inv = kron(inv_rho.transpose(), id);
    r.gns_residual = (diss - gamma * diss.adjoint() * gamma_inv).norm() / scale;

    for (int k = 1; k <= decomp.size(); ++k) {
        const double o = decomp.condition_number(k);
        r.max_condition_number = std::max(r.max_condition_number, o);
        if (o > r.bound * (1.0 + 1e-8)) {
            ++r.violations;
        }
        if (decomp.cluster_size(k) == 1) {
            ++r.nondegenerate_modes;
            const CMatrix& right = decomp.right(k);
            r.left_right_residual = std::max(r.left_right_residual,
                                             projection_residual(decomp.left(k), right * inv_rho));
            r.left_right_residual_rho =
                std::max(r.left_right_residual_rho,
                         projection_residual(decomp.left(k), right * model.rho_beta));
        }
    }
    r.stationary_distance = hermitian_trace_norm(decomp.stationary_state - model.rho_beta);
    if (throw_on_violation && r.violations > 0) {
        throw BoundViolated("qdb_bound_check: " + std::to_string(r.violations) +
                            " modes exceed O_k <= exp(beta dE / 2) = " + std::to_string(r.bound) +
                            " (max O_k = " + std::to_string(r.max_condition_number) + ")");
    }
    return r;
}

} // namespace relaxtyp

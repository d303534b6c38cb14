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
#include <functional>
#include <optional>
#include <vector>

#include "relaxtyp/lindblad.hpp"

namespace relaxtyp {

/// Pauli and ladder matrices; sigma_minus = |0><1| lowers |1> to |0>.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix sigma_minus();
CMatrix sigma_plus();

/// op acting on qubit `site` (0-based, leftmost Kronecker factor first) of n qubits.
CMatrix site_operator(const CMatrix& op, int site, int n);

struct ChainParams {
    int n = 1;
    double energy = 1.0;
    double gamma0 = 0.0;
    double gamma1 = 1.0;
    double gamma_dephasing = 0.0;

    void validate() const;
};

/// H = sum (E/2) sigma_z, jumps sqrt(gamma1) sigma_minus, sqrt(gamma0) sigma_plus
/// and, when gamma_dephasing > 0, sqrt(gamma_dephasing) sigma_z on every site.
LindbladModel build_chain(const ChainParams& p);

/// Dephasing part alone: sum_i gamma_D (sigma_z rho sigma_z - rho).
CMatrix chain_dephasing_superoperator(const ChainParams& p);

/// sum_i c_i L_i with distinct irrational site weights c_i. Commutes with
/// the chain generator and separates modes that differ only by site.
CMatrix chain_splitter(const ChainParams& p);

struct ChainOracle {
    SpectralDecomposition decomp;
    /// Single-qubit mode index (1..4) per site for every mode.
    std::vector<std::vector<int>> labels;
};

/// All 4^N modes from tensor products of the single-qubit eigensystem,
/// ordered and normalized like spectral_decompose. Requires gamma_dephasing = 0.
ChainOracle analytic_chain_oracle(const ChainParams& p,
                                  Normalization normalization = Normalization::TraceNorm);

/// ||L||_2 of the tensor mode with the given labels, from single-qubit norms.
double chain_left_norm(const ChainParams& p, const std::vector<int>& labels);

/// tr(L^dagger)/d of the tensor mode with the given labels.
double chain_mean_overlap(const ChainParams& p, const std::vector<int>& labels);

struct TFIMParams {
    int n = 2;
    double j = 1.0;
    double g = 1.0;
    double beta = 1.0;
    double gamma = 0.5;
    double energy = 1.0;
    std::optional<double> gamma0;
    std::optional<double> gamma1;

    void validate() const;
};

struct Rates {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
};

/// gamma1 / gamma0 = exp(beta E) with gamma0 + gamma1 = 2 gamma unless overridden.
Rates tfim_rates(const TFIMParams& p);

/// Open chain H = -J sum sz_i sz_{i+1} - g sum sx_i with the chain's jumps.
LindbladModel build_tfim(const TFIMParams& p);

using RateProfile = std::function<double(double)>;

/// gamma(w) = gamma exp(beta w / 2), w being the energy released by the jump.
RateProfile symmetric_kms_profile(double gamma, double beta);

struct DaviesModel {
    LindbladModel model;
    /// Same jumps, zero Hamiltonian.
    LindbladModel dissipator;
    CMatrix h0;
    double beta = 0.0;
    CMatrix rho_beta;
    double energy_range = 0.0;
    std::vector<double> bohr_frequencies;
};

/// Couplings must be Hermitian. Jumps sqrt(gamma(w)) A(w), where A(w) collects
/// the energy-eigenbasis blocks of A lowering the energy by w.
DaviesModel build_davies(const CMatrix& h0, const std::vector<CMatrix>& couplings, double beta,
                         const RateProfile& rate_profile);

/// GUE Hamiltonian on n qubits with sigma_x and sigma_z couplings on every site.
DaviesModel random_davies(int n_qubits, double beta, std::uint64_t seed, double gamma = 1.0);

struct QdbReport {
    double max_condition_number = 0.0;
    /// exp(beta * Delta E / 2)
    double bound = 1.0;
    Index violations = 0;
    /// ||D - G D^dagger G^-1||_F / ||D||_F with G(X) = rho^1/2 X rho^1/2.
    double kms_residual = 0.0;
    /// Same with Gamma(X) = X rho.
    double gns_residual = 0.0;
    /// Max over nondegenerate modes of the relative distance of L_k from span(R_k rho^-1).
    double left_right_residual = 0.0;
    /// Same for span(R_k rho).
    double left_right_residual_rho = 0.0;
    Index nondegenerate_modes = 0;
    /// ||rho_ss - rho_beta||_1
    double stationary_distance = 0.0;
};

/// Throws BoundViolated when some O_k exceeds the bound by more than 1e-8 relative
/// and throw_on_violation is set.
QdbReport qdb_bound_check(const DaviesModel& model, const SpectralDecomposition& decomp,
                          bool throw_on_violation = true);

} // namespace relaxtyp

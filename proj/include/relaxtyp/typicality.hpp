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
#include "relaxtyp/lindblad.hpp"

namespace relaxtyp {

/// a_k = tr(L_k^dagger rho).
Complex overlap(const SpectralDecomposition& decomp, const CMatrix& rho, int k);

struct Moments {
    Complex mean;
    /// <|a_k|^2> - |<a_k>|^2
    double variance = 0.0;
};

Moments closed_form_moments(const SpectralDecomposition& decomp, const EnsembleSpec& spec, int k);

struct VarianceBounds {
    /// ||L_k||_2^2 / d^2
    double haar_bound = 0.0;
    /// ||L_k||_2^2 / d^3
    double hs_bound = 0.0;
};

VarianceBounds variance_upper_bounds(const SpectralDecomposition& decomp, int k);

double chebyshev_tail(double variance, double eps);

struct OverlapStatistics {
    int mode = 0;
    Complex mean;
    double variance = 0.0;
    Complex mc_mean;
    double mc_variance = 0.0;
    Index mc_samples = 0;
    /// Standard error of mc_mean.
    double mc_standard_error = 0.0;
    /// Standard error of mc_variance from the fourth central moment.
    double mc_variance_standard_error = 0.0;
    std::string ensemble;
};

/// Row i holds a_k for sample i, one column per entry of `modes`. Sample i
/// is drawn with seed derive_seed(seed, i).
CMatrix overlap_samples(const SpectralDecomposition& decomp, const EnsembleSpec& spec,
                        const std::vector<int>& modes, Index n, std::uint64_t seed,
                        unsigned threads = 1);

std::vector<OverlapStatistics> mc_moments(const SpectralDecomposition& decomp,
                                          const EnsembleSpec& spec, const std::vector<int>& modes,
                                          Index n, std::uint64_t seed, unsigned threads = 1);

/// Numerical radius of L_k: the largest |a_k| over all states.
double max_overlap(const SpectralDecomposition& decomp, int k);

struct RelaxationTime {
    double time = 0.0;
    /// Mode whose mean overlap set the time; 2 unless <a_2> vanishes.
    int mode = 2;
};

/// Solves |<a_k>| exp(-|Re lambda_k| tau) = eps with <a_k> = tr(L_k^dagger)/d.
RelaxationTime typical_relaxation_time(const SpectralDecomposition& decomp, double eps);

/// First time after which ||rho(t) - rho_ss||_1 <= eps on every later grid point.
double mixing_time_state(const SpectralDecomposition& decomp, const CMatrix& rho, double eps,
                         double horizon, int grid = 200);

struct TypicalMixingOptions {
    /// Modes whose overlaps define the typical set.
    std::vector<int> modes{2};
    /// 0 selects 50 / |Re lambda_2|.
    double horizon = 0.0;
    int grid = 200;
    unsigned threads = 1;
};

struct TypicalMixing {
    double time = 0.0;
    double acceptance_fraction = 0.0;
    Index accepted = 0;
    /// Max over all samples (the delta -> infinity limit on this sample set).
    double worst_case = 0.0;
    /// Smallest mixing time inside the typical set.
    double typical_min = 0.0;
};

TypicalMixing typical_mixing_time(const SpectralDecomposition& decomp, const EnsembleSpec& spec,
                                  double delta, double eps, Index n, std::uint64_t seed,
                                  const TypicalMixingOptions& options = {});

struct TsmeOptions {
    /// Defaults to 10 / d.
    std::optional<double> tol_mean;
    /// Defaults to 10 ||L_2||_2^2 / d^2.
    std::optional<double> tol_var;
};

struct TsmeDiagnostic {
    bool tsme = false;
    double mean_a2 = 0.0;
    double tol_mean = 0.0;
    double tol_var = 0.0;
    /// Modes k >= 3 with |Re lambda_k| / |Re lambda_2| <= log2(d).
    std::vector<int> ratio_ok_modes;
};

TsmeDiagnostic tsme_diagnostic(const SpectralDecomposition& decomp, double variance_a2,
                               const TsmeOptions& options = {});

enum class Regime { Concentrating, Marginal, Diverging };

std::string regime_name(Regime regime);

struct ScalingPoint {
    double d = 0.0;
    double variance = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Regime regime = Regime::Marginal;
};

/// Least squares of log2(variance) against log2(d).
ScalingFit scaling_fit(const std::vector<ScalingPoint>& points);

/// Modes k >= 2 among `modes` with O_k^2 < d^(q-1), i.e. whose variance bound
/// O_k^2 / d^(q-1) vanishes relative to one.
std::vector<int> concentrating_modes(const SpectralDecomposition& decomp,
                                     const std::vector<int>& modes, int q);

} // namespace relaxtyp

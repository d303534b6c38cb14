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

#include "relaxtyp/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "relaxtyp/errors.hpp"

namespace relaxtyp {

Complex overlap(const SpectralDecomposition& decomp, const CMatrix& rho, int k)
{
    const CMatrix& left = decomp.left(k);
    if (rho.rows() != left.rows() || rho.cols() != left.cols()) {
        throw InvalidArgument("overlap: state dimension does not match the decomposition");
    }
    return left.conjugate().cwiseProduct(rho).sum();
}

namespace {

// tr_E(P (X (x) I_E) P) for P on S (x) E.
CMatrix compress(const CMatrix& projector, const CMatrix& x, Index d, Index dim_e)
{
    const CMatrix lifted = kron(x, CMatrix::Identity(dim_e, dim_e));
    return partial_trace(projector * lifted * projector, d, dim_e, Keep::A);
}

} // namespace

Moments closed_form_moments(const SpectralDecomposition& decomp, const EnsembleSpec& spec, int k)
{
    spec.validate();
    if (spec.dim != decomp.d) {
        throw InvalidArgument("closed_form_moments: ensemble dimension " +
                              std::to_string(spec.dim) + " does not match d = " +
                              std::to_string(decomp.d));
    }
    const CMatrix& left = decomp.left(k);
    const double d = static_cast<double>(decomp.d);
    const Complex trace_dag = std::conj(left.trace());
    const double spread = left.squaredNorm() - std::norm(trace_dag) / d;

    Moments out;
    out.mean = trace_dag / d;
    switch (spec.kind) {
    case EnsembleKind::TwoDesign: {
        const double purity = spec.reference.squaredNorm();
        out.variance = d > 1.0 ? (purity - 1.0 / d) * spread / (d * d - 1.0) : 0.0;
        break;
    }
    case EnsembleKind::HilbertSchmidt:
        out.variance = spread / (d * (d * d + 1.0));
        break;
    case EnsembleKind::Induced:
        out.variance = spread / (d * (d * static_cast<double>(spec.env_dim) + 1.0));
        break;
    case EnsembleKind::ConstrainedPure: {
        const double d_r = static_cast<double>(spec.range_dim());
        const CMatrix omega = partial_trace(spec.projector, spec.dim, spec.env_dim, Keep::A) / d_r;
        const CMatrix phi = compress(spec.projector, left, spec.dim, spec.env_dim) / d_r;
        out.mean = left.conjugate().cwiseProduct(omega).sum();
        const double second = left.conjugate().cwiseProduct(phi).sum().real();
        out.variance = (second - std::norm(out.mean)) / (d_r + 1.0);
        break;
    }
    }
    if (out.variance < 0.0) {
        if (out.variance < -1e-12) {
            throw NumericalError("closed_form_moments: negative variance " +
                                 std::to_string(out.variance));
        }
        out.variance = 0.0;
    }
    return out;
}

VarianceBounds variance_upper_bounds(const SpectralDecomposition& decomp, int k)
{
    const double norm2 = decomp.left(k).squaredNorm();
    const double d = static_cast<double>(decomp.d);
    return {norm2 / (d * d), norm2 / (d * d * d)};
}

double chebyshev_tail(double variance, double eps)
{
    if (!(eps > 0.0)) {
        throw InvalidArgument("chebyshev_tail: eps must be positive");
    }
    if (std::isinf(eps)) {
        return 0.0;
    }
    return std::min(1.0, variance / (eps * eps));
}

CMatrix overlap_samples(const SpectralDecomposition& decomp, const EnsembleSpec& spec,
                        const std::vector<int>& modes, Index n, std::uint64_t seed,
                        unsigned threads)
{
    for (int k : modes) {
        decomp.check_mode(k);
    }
    if (spec.dim != decomp.d) {
        throw InvalidArgument("overlap_samples: ensemble dimension does not match d");
    }
    const StateSampler sampler(spec);
    const Index m = static_cast<Index>(modes.size());
    CMatrix out(n, m);
    detail::parallel_for(static_cast<long>(n), threads, [&](long i) {
        const CMatrix rho = sampler.sample(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (Index c = 0; c < m; ++c) {
            out(i, c) = overlap(decomp, rho, modes[static_cast<size_t>(c)]);
        }
    });
    return out;
}

std::vector<OverlapStatistics> mc_moments(const SpectralDecomposition& decomp,
                                          const EnsembleSpec& spec, const std::vector<int>& modes,
                                          Index n, std::uint64_t seed, unsigned threads)
{
    if (n < 100) {
        throw InvalidArgument("mc_moments: need at least 100 samples");
    }
    const CMatrix samples = overlap_samples(decomp, spec, modes, n, seed, threads);
    const double count = static_cast<double>(n);
    std::vector<OverlapStatistics> out;
    for (size_t c = 0; c < modes.size(); ++c) {
        const auto column = samples.col(static_cast<Index>(c));
        const Moments exact = closed_form_moments(decomp, spec, modes[c]);
        OverlapStatistics s;
        s.mode = modes[c];
        s.mean = exact.mean;
        s.variance = exact.variance;
        s.mc_samples = n;
        s.ensemble = spec.name();
        s.mc_mean = column.sum() / count;
        double m2 = 0.0;
        double m4 = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double dev = std::norm(column(i) - s.mc_mean);
            m2 += dev;
            m4 += dev * dev;
        }
        s.mc_variance = m2 / (count - 1.0);
        m4 /= count;
        s.mc_standard_error = std::sqrt(s.mc_variance / count);
        const double m2_biased = m2 / count;
        s.mc_variance_standard_error = std::sqrt(std::max(0.0, m4 - m2_biased * m2_biased) / count);
        out.push_back(s);
    }
    return out;
}

double max_overlap(const SpectralDecomposition& decomp, int k)
{
    return numerical_radius(decomp.left(k));
}

namespace {

double gap(const SpectralDecomposition& decomp)
{
    if (decomp.size() < 2) {
        throw InvalidArgument("decomposition has no decaying mode");
    }
    const double g = std::abs(decomp.eigenvalue(2).real());
    if (g < 1e-12) {
        throw GapClosed("spectral gap |Re lambda_2| = " + std::to_string(g) + " is closed");
    }
    return g;
}

} // namespace

RelaxationTime typical_relaxation_time(const SpectralDecomposition& decomp, double eps)
{
    if (!(eps > 0.0)) {
        throw InvalidArgument("typical_relaxation_time: eps must be positive");
    }
    gap(decomp);
    const double d = static_cast<double>(decomp.d);
    for (int k = 2; k <= decomp.size(); ++k) {
        const double mean = std::abs(decomp.left(k).trace()) / d;
        if (mean <= 1e-10 * std::max(1.0, decomp.left(k).norm())) {
            continue;
        }
        const double rate = std::abs(decomp.eigenvalue(k).real());
        if (rate < 1e-12) {
            throw GapClosed("typical_relaxation_time: mode " + std::to_string(k) +
                            " does not decay");
        }
        return {mean > eps ? std::log(mean / eps) / rate : 0.0, k};
    }
    return {0.0, 2};
}

double mixing_time_state(const SpectralDecomposition& decomp, const CMatrix& rho, double eps,
                         double horizon, int grid)
{
    if (!(eps > 0.0) || eps > 2.0) {
        throw InvalidArgument("mixing_time_state: eps must lie in (0, 2]");
    }
    if (grid < 2) {
        throw InvalidArgument("mixing_time_state: grid needs at least 2 points");
    }
    const double g = gap(decomp);
    if (horizon < 10.0 / g * (1.0 - 1e-12)) {
        throw InvalidArgument("mixing_time_state: horizon shorter than 10 / |Re lambda_2|");
    }
    const SpectralPropagator prop(decomp, rho);

    std::vector<double> times{0.0};
    const double t_min = 0.01 / g;
    for (int i = 0; i < grid; ++i) {
        times.push_back(t_min * std::pow(horizon / t_min, static_cast<double>(i) / (grid - 1)));
    }
    times.back() = horizon;

    int last_above = -1;
    for (int i = 0; i < static_cast<int>(times.size()); ++i) {
        if (prop.distance_to_stationary(times[static_cast<size_t>(i)]) > eps) {
            last_above = i;
        }
    }
    if (last_above == static_cast<int>(times.size()) - 1) {
        throw NotReached("mixing_time_state: distance exceeds eps at the horizon");
    }
    if (last_above < 0) {
        return 0.0;
    }
    double lo = times[static_cast<size_t>(last_above)];
    double hi = times[static_cast<size_t>(last_above) + 1];
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (prop.distance_to_stationary(mid) > eps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

TypicalMixing typical_mixing_time(const SpectralDecomposition& decomp, const EnsembleSpec& spec,
                                  double delta, double eps, Index n, std::uint64_t seed,
                                  const TypicalMixingOptions& options)
{
    if (n < 100) {
        throw InvalidArgument("typical_mixing_time: need at least 100 samples");
    }
    if (!(delta > 0.0)) {
        throw InvalidArgument("typical_mixing_time: delta must be positive");
    }
    const double horizon = options.horizon > 0.0 ? options.horizon : 50.0 / gap(decomp);
    std::vector<Complex> means;
    for (int k : options.modes) {
        means.push_back(closed_form_moments(decomp, spec, k).mean);
    }
    const StateSampler sampler(spec);
    std::vector<double> times(static_cast<size_t>(n));
    std::vector<char> inside(static_cast<size_t>(n));
    detail::parallel_for(static_cast<long>(n), options.threads, [&](long i) {
        const CMatrix rho = sampler.sample(derive_seed(seed, static_cast<std::uint64_t>(i)));
        bool ok = true;
        for (size_t c = 0; c < options.modes.size(); ++c) {
            if (std::abs(overlap(decomp, rho, options.modes[c]) - means[c]) > delta) {
                ok = false;
            }
        }
        inside[static_cast<size_t>(i)] = ok ? 1 : 0;
        times[static_cast<size_t>(i)] = mixing_time_state(decomp, rho, eps, horizon, options.grid);
    });

    TypicalMixing out;
    out.typical_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < times.size(); ++i) {
        out.worst_case = std::max(out.worst_case, times[i]);
        if (inside[i]) {
            ++out.accepted;
            out.time = std::max(out.time, times[i]);
            out.typical_min = std::min(out.typical_min, times[i]);
        }
    }
    if (out.accepted == 0) {
        throw EmptyTypicalSet("typical_mixing_time: no sample within delta of the mean overlaps");
    }
    out.acceptance_fraction = static_cast<double>(out.accepted) / static_cast<double>(n);
    return out;
}

TsmeDiagnostic tsme_diagnostic(const SpectralDecomposition& decomp, double variance_a2,
                               const TsmeOptions& options)
{
    const double d = static_cast<double>(decomp.d);
    const CMatrix& l2 = decomp.left(2);
    TsmeDiagnostic out;
    out.mean_a2 = std::abs(l2.trace()) / d;
    out.tol_mean = options.tol_mean.value_or(10.0 / d);
    out.tol_var = options.tol_var.value_or(10.0 * l2.squaredNorm() / (d * d));
    out.tsme = out.mean_a2 < out.tol_mean && variance_a2 < out.tol_var;
    const double g = gap(decomp);
    for (int k = 3; k <= decomp.size(); ++k) {
        if (std::abs(decomp.eigenvalue(k).real()) / g <= std::log2(d)) {
            out.ratio_ok_modes.push_back(k);
        }
    }
    return out;
}

std::string regime_name(Regime regime)
{
    switch (regime) {
    case Regime::Concentrating:
        return "concentrating";
    case Regime::Marginal:
        return "marginal";
    case Regime::Diverging:
        return "diverging";
    }
    return "unknown";
}

ScalingFit scaling_fit(const std::vector<ScalingPoint>& points)
{
    if (points.size() < 3) {
        throw InvalidArgument("scaling_fit: need at least 3 points");
    }
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].variance > 0.0) || !(points[i].d > 0.0)) {
            throw InvalidArgument("scaling_fit: dimensions and variances must be positive");
        }
        for (size_t j = 0; j < i; ++j) {
            if (points[j].d == points[i].d) {
                throw InvalidArgument("scaling_fit: repeated dimension");
            }
        }
        vmin = std::min(vmin, points[i].variance);
        vmax = std::max(vmax, points[i].variance);
    }
    if (vmax - vmin < 1e-300) {
        throw DegenerateFit("scaling_fit: all variances are equal");
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : points) {
        sx += std::log2(p.d);
        sy += std::log2(p.variance);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& p : points) {
        const double x = std::log2(p.d) - mx;
        const double y = std::log2(p.variance) - my;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    if (fit.r_squared < 0.9) {
        fit.regime = Regime::Marginal;
    } else if (fit.exponent < -0.25) {
        fit.regime = Regime::Concentrating;
    } else if (fit.exponent > 0.25) {
        fit.regime = Regime::Diverging;
    } else {
        fit.regime = Regime::Marginal;
    }
    return fit;
}

std::vector<int> concentrating_modes(const SpectralDecomposition& decomp,
                                     const std::vector<int>& modes, int q)
{
    const double scale = std::pow(static_cast<double>(decomp.d), q - 1);
    std::vector<int> out;
    for (int k : modes) {
        if (k >= 2) {
            const double o = decomp.condition_number(k);
            if (o * o < scale) {
                out.push_back(k);
            }
        }
    }
    return out;
}

} // namespace relaxtyp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "relaxtyp/errors.hpp"
#include "relaxtyp/lindblad.hpp"
#include "relaxtyp/typicality.hpp"

using namespace relaxtyp;

namespace {

LindbladModel random_model(Index d, int n_jumps, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    LindbladModel m;
    m.dim = d;
    m.hamiltonian = oracle::random_hermitian(d, gen);
    for (int j = 0; j < n_jumps; ++j) {
        m.jumps.push_back(oracle::random_matrix(d, d, gen) / std::sqrt(double(d)));
    }
    return m;
}

CMatrix random_projector(Index n, Index rank, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    Eigen::HouseholderQR<CMatrix> qr(oracle::random_matrix(n, rank, gen));
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, rank);
    return q * q.adjoint();
}

} // namespace

TEST_CASE("overlap is the trace pairing")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 41));
    std::mt19937_64 gen(42);
    const CMatrix rho = oracle::random_density(3, gen);
    for (int k = 1; k <= dec.size(); ++k) {
        CHECK(std::abs(overlap(dec, rho, k) - (dec.left(k).adjoint() * rho).trace()) < 1e-14);
    }
    CHECK(std::abs(overlap(dec, rho, 1) - 1.0) < 1e-10);
    CHECK_THROWS_AS(overlap(dec, CMatrix::Identity(2, 2), 2), InvalidArgument);
}

TEST_CASE("closed-form moments match the second-moment operator")
{
    const Index d = 3;
    const SpectralDecomposition dec = spectral_decompose(random_model(d, 2, 43));
    const CMatrix mixed = CMatrix::Identity(d, d) / double(d);

    for (int k = 2; k <= dec.size(); ++k) {
        const CMatrix& l = dec.left(k);
        const double pure = oracle::overlap_variance(l, mixed, oracle::induced_second_moment(d, 1));
        const double hs = oracle::overlap_variance(l, mixed, oracle::induced_second_moment(d, d));
        const double ind = oracle::overlap_variance(l, mixed, oracle::induced_second_moment(d, 5));
        CHECK(closed_form_moments(dec, EnsembleSpec::two_design_pure(d), k).variance ==
              doctest::Approx(pure).epsilon(1e-10));
        CHECK(closed_form_moments(dec, EnsembleSpec::hilbert_schmidt(d), k).variance ==
              doctest::Approx(hs).epsilon(1e-10));
        CHECK(closed_form_moments(dec, EnsembleSpec::induced(d, 5), k).variance ==
              doctest::Approx(ind).epsilon(1e-10));
        const Complex mean = closed_form_moments(dec, EnsembleSpec::hilbert_schmidt(d), k).mean;
        CHECK(std::abs(mean - (l.adjoint() * mixed).trace()) < 1e-14);
    }
}

TEST_CASE("two-design moments around a mixed reference")
{
    // Second moment of U sigma U^dagger: E[rho (x) rho] = a I + b F with a, b fixed by
    // tr sigma = 1 and tr sigma^2.
    const Index d = 3;
    const SpectralDecomposition dec = spectral_decompose(random_model(d, 2, 44));
    CMatrix sigma = CMatrix::Zero(d, d);
    sigma(0, 0) = 0.5;
    sigma(1, 1) = 0.3;
    sigma(2, 2) = 0.2;
    const double p = (sigma * sigma).trace().real();
    const double dd = double(d);
    const double a = (1.0 - p / dd) / (dd * dd - 1.0);
    const double b = (p - 1.0 / dd) / (dd * dd - 1.0);
    const CMatrix second = a * CMatrix::Identity(d * d, d * d) + b * oracle::swap_operator(d);
    const CMatrix mixed = CMatrix::Identity(d, d) / dd;
    for (int k = 2; k <= dec.size(); ++k) {
        const double v = oracle::overlap_variance(dec.left(k), mixed, second);
        CHECK(closed_form_moments(dec, EnsembleSpec::two_design(sigma), k).variance ==
              doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("constrained ensemble moments match the projected second moment")
{
    const Index d = 2, de = 3;
    const SpectralDecomposition dec = spectral_decompose(random_model(d, 2, 45));
    const CMatrix p = random_projector(d * de, 4, 46);
    const CMatrix second = oracle::constrained_second_moment(p, d, de);
    // First moment: tr_E(P) / r.
    CMatrix first = CMatrix::Zero(d, d);
    for (Index s1 = 0; s1 < d; ++s1)
        for (Index s2 = 0; s2 < d; ++s2)
            for (Index e = 0; e < de; ++e)
                first(s1, s2) += p(s1 * de + e, s2 * de + e) / 4.0;
    const EnsembleSpec spec = EnsembleSpec::constrained_pure(p, d, de);
    for (int k = 1; k <= dec.size(); ++k) {
        const Moments m = closed_form_moments(dec, spec, k);
        CHECK(std::abs(m.mean - (dec.left(k).adjoint() * first).trace()) < 1e-12);
        CHECK(m.variance == doctest::Approx(oracle::overlap_variance(dec.left(k), first, second))
                                .epsilon(1e-9));
    }
}

TEST_CASE("variance bound chain holds strictly")
{
    for (std::uint64_t seed : {51u, 52u, 53u}) {
        const SpectralDecomposition dec = spectral_decompose(random_model(4, 3, seed));
        const double d = 4.0;
        for (int k = 2; k <= dec.size(); ++k) {
            const VarianceBounds b = variance_upper_bounds(dec, k);
            const double o2 = std::pow(dec.condition_number(k), 2);
            CHECK(closed_form_moments(dec, EnsembleSpec::two_design_pure(4), k).variance < b.haar_bound);
            CHECK(closed_form_moments(dec, EnsembleSpec::hilbert_schmidt(4), k).variance < b.hs_bound);
            CHECK(b.haar_bound <= o2 / d * (1 + 1e-12));
            CHECK(b.hs_bound <= o2 / (d * d) * (1 + 1e-12));
        }
    }
    CHECK(chebyshev_tail(0.01, 0.2) == doctest::Approx(0.25));
    CHECK(chebyshev_tail(1.0, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("monte carlo moments agree with the closed form")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 54));
    const std::vector<int> modes{2, 3, 5};
    for (const EnsembleSpec& spec :
         {EnsembleSpec::two_design_pure(3), EnsembleSpec::hilbert_schmidt(3), EnsembleSpec::induced(3, 2)}) {
        const auto stats = mc_moments(dec, spec, modes, 20000, 77, 2);
        REQUIRE(stats.size() == modes.size());
        for (const auto& s : stats) {
            CHECK(s.mc_samples == 20000);
            CHECK(std::abs(s.mc_variance - s.variance) < 5 * s.mc_variance_standard_error);
            CHECK(std::abs(s.mc_mean - s.mean) < 5 * std::sqrt(2.0) * s.mc_standard_error);
        }
    }
    CHECK_THROWS_AS(mc_moments(dec, EnsembleSpec::hilbert_schmidt(3), modes, 50, 1), InvalidArgument);
}

TEST_CASE("sampling is independent of the thread count")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 55));
    const EnsembleSpec spec = EnsembleSpec::hilbert_schmidt(3);
    const CMatrix a = overlap_samples(dec, spec, {2, 3}, 300, 9, 1);
    const CMatrix b = overlap_samples(dec, spec, {2, 3}, 300, 9, 4);
    CHECK((a - b).norm() == 0.0);
}

TEST_CASE("maximal overlap bounds every sampled overlap")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 56));
    const CMatrix s = overlap_samples(dec, EnsembleSpec::two_design_pure(3), {2, 4}, 500, 3);
    const double w2 = max_overlap(dec, 2);
    const double w4 = max_overlap(dec, 4);
    CHECK(w2 == doctest::Approx(oracle::numerical_radius_scan(dec.left(2))).epsilon(1e-6));
    for (Index i = 0; i < s.rows(); ++i) {
        CHECK(std::abs(s(i, 0)) <= w2 + 1e-10);
        CHECK(std::abs(s(i, 1)) <= w4 + 1e-10);
    }
    for (int k = 1; k <= dec.size(); ++k) {
        CHECK(dec.left(k).norm() <= 2.0 * std::sqrt(3.0) * max_overlap(dec, k) * (1 + 1e-9));
    }
}

TEST_CASE("typical relaxation time solves the mean decay condition")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 57));
    const RelaxationTime tau = typical_relaxation_time(dec, 1e-4);
    const double mean = std::abs(dec.left(tau.mode).trace()) / 3.0;
    const double rate = std::abs(dec.eigenvalue(tau.mode).real());
    CHECK(mean * std::exp(-rate * tau.time) == doctest::Approx(1e-4).epsilon(1e-10));
    CHECK_THROWS_AS(typical_relaxation_time(dec, 0.0), InvalidArgument);
}

TEST_CASE("state mixing time matches an exponential-propagation scan")
{
    const LindbladModel m = random_model(3, 2, 58);
    const SpectralDecomposition dec = spectral_decompose(m);
    const CMatrix s = oracle::superoperator_by_columns(m.hamiltonian, m.jumps);
    const CMatrix rho0 = oracle::basis(3, 0, 0);
    const double g = std::abs(dec.eigenvalue(2).real());
    const double eps = 0.01;
    const double t = mixing_time_state(dec, rho0, eps, 60.0 / g);
    CHECK(oracle::hermitian_trace_distance(oracle::expm_propagate(s, rho0, t) - dec.stationary_state) ==
          doctest::Approx(eps).epsilon(1e-6));
    // No later crossing on a fine grid.
    for (int i = 1; i <= 400; ++i) {
        const double ti = t + i * (50.0 / g) / 400.0;
        CHECK(oracle::hermitian_trace_distance(oracle::expm_propagate(s, rho0, ti) -
                                               dec.stationary_state) <= eps * (1 + 1e-8));
    }
    CHECK(mixing_time_state(dec, dec.stationary_state, eps, 60.0 / g) == 0.0);
    CHECK_THROWS_AS(mixing_time_state(dec, rho0, 1e-12, 10.0 / g), NotReached);
    CHECK_THROWS_AS(mixing_time_state(dec, rho0, eps, 1.0 / g), InvalidArgument);
}

TEST_CASE("typical mixing time orders below the sample maximum")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 59));
    const EnsembleSpec spec = EnsembleSpec::hilbert_schmidt(3);
    const double sigma = std::sqrt(closed_form_moments(dec, spec, 2).variance);
    const TypicalMixing t = typical_mixing_time(dec, spec, 3 * sigma, 0.01, 200, 5);
    CHECK(t.accepted > 0);
    CHECK(t.time <= t.worst_case);
    CHECK(t.typical_min <= t.time);
    CHECK(t.acceptance_fraction == doctest::Approx(t.accepted / 200.0));
    CHECK_THROWS_AS(typical_mixing_time(dec, spec, 1e-14, 0.01, 200, 5), EmptyTypicalSet);
}

TEST_CASE("scaling fit recovers an exact power law")
{
    std::vector<ScalingPoint> pts;
    for (double d : {4.0, 8.0, 16.0, 32.0}) {
        pts.push_back({d, 3.0 * std::pow(d, -1.5)});
    }
    const ScalingFit f = scaling_fit(pts);
    CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.regime == Regime::Concentrating);

    std::vector<ScalingPoint> up{{2.0, 1.0}, {4.0, 2.0}, {8.0, 4.0}};
    CHECK(scaling_fit(up).regime == Regime::Diverging);
    std::vector<ScalingPoint> flat{{2.0, 1.0}, {4.0, 1.0}, {8.0, 1.0}};
    CHECK_THROWS_AS(scaling_fit(flat), DegenerateFit);
    std::vector<ScalingPoint> two{{2.0, 1.0}, {4.0, 2.0}};
    CHECK_THROWS_AS(scaling_fit(two), InvalidArgument);
}

TEST_CASE("concentrating modes compare O_k squared with d^(q-1)")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 60));
    const std::vector<int> all{2, 3, 4, 5, 6, 7, 8, 9};
    for (int q : {2, 3}) {
        const auto c = concentrating_modes(dec, all, q);
        for (int k : all) {
            const bool expected = std::pow(dec.condition_number(k), 2) < std::pow(3.0, q - 1);
            CHECK((std::find(c.begin(), c.end(), k) != c.end()) == expected);
        }
    }
}

TEST_CASE("tsme diagnostic thresholds")
{
    const SpectralDecomposition dec = spectral_decompose(random_model(3, 2, 61));
    TsmeOptions o;
    o.tol_mean = 1e9;
    o.tol_var = 1e9;
    CHECK(tsme_diagnostic(dec, 0.5, o).tsme);
    o.tol_var = 0.1;
    CHECK_FALSE(tsme_diagnostic(dec, 0.5, o).tsme);
    CHECK(tsme_diagnostic(dec, 0.0).mean_a2 ==
          doctest::Approx(std::abs(dec.left(2).trace()) / 3.0));
}

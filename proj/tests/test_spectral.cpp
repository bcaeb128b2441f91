// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "tofpr/errors.hpp"
#include "tofpr/spectral.hpp"
#include "test_util.hpp"

using namespace tofpr;
using namespace testutil;

namespace {

constexpr double kPeriod = 96e-9;
const double kOmega0 = 2.0 * std::numbers::pi / kPeriod;

UniformSpectrumSamples exponential_sum(int bandlimit, const std::vector<cplx>& amplitudes,
                                       const std::vector<double>& delays) {
    UniformSpectrumSamples samples;
    samples.omega0 = kOmega0;
    samples.bandlimit = bandlimit;
    samples.values.resize(static_cast<std::size_t>(2 * bandlimit + 1));
    for (int ell = -bandlimit; ell <= bandlimit; ++ell) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < amplitudes.size(); ++i) {
            const double phase = -kOmega0 * ell * delays[i];
            acc += amplitudes[i] * cplx(std::cos(phase), std::sin(phase));
        }
        samples.values[static_cast<std::size_t>(ell + bandlimit)] = acc;
    }
    return samples;
}

// s_hat-style samples: DC a0 plus one cosine of amplitude 2*a01
UniformSpectrumSamples phaseless_samples(int bandlimit, double a0, double a01, double t01) {
    UniformSpectrumSamples samples;
    samples.omega0 = kOmega0;
    samples.bandlimit = bandlimit;
    samples.values.resize(static_cast<std::size_t>(2 * bandlimit + 1));
    for (int ell = -bandlimit; ell <= bandlimit; ++ell)
        samples.values[static_cast<std::size_t>(ell + bandlimit)] =
            cplx(a0 + 2.0 * a01 * std::cos(kOmega0 * ell * t01), 0.0);
    return samples;
}

double delay_of(const ExponentialModel& model, std::size_t i) {
    return model.components[i].delay_s;
}

} // namespace

TEST_CASE("cadzow is a fixed point on noiseless low-rank data") {
    const auto samples = exponential_sum(
        10, {cplx(2.0, 0.0), cplx(1.0, 0.5), cplx(0.5, -0.25)}, {0.0, 12e-9, -31e-9});
    const CadzowResult result = cadzow_denoise(samples, 3);
    CHECK(result.iterations == 0);
    CHECK(result.singular_ratio <= 1e-10);
    double scale = 0.0;
    for (const auto& v : samples.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < samples.values.size(); ++i)
        CHECK(std::abs(result.samples.values[i] - samples.values[i]) <= 1e-10 * scale);
}

TEST_CASE("cadzow rejects infeasible ranks") {
    const auto samples = phaseless_samples(3, 1.0, 0.3, 20e-9); // Hankel is 4x4
    CHECK_THROWS_AS(cadzow_denoise(samples, 0), std::invalid_argument);
    CHECK_THROWS_AS(cadzow_denoise(samples, 4), std::invalid_argument);
    CHECK_NOTHROW(cadzow_denoise(samples, 3));
}

TEST_CASE("cadzow rank distance is non-increasing") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto samples = phaseless_samples(10, 5.0, 2.0, 17e-9);
        double peak = 0.0;
        for (const auto& v : samples.values) peak = std::max(peak, std::abs(v));
        for (auto& v : samples.values) v += 0.05 * peak * gauss(rng);
        const CadzowResult result = cadzow_denoise(samples, 3);
        REQUIRE(result.rank_distance_history.size() >= 2);
        const double slack = 1e-12 * (result.rank_distance_history.front() + peak);
        for (std::size_t i = 1; i < result.rank_distance_history.size(); ++i)
            CHECK(result.rank_distance_history[i] <=
                  result.rank_distance_history[i - 1] + slack);
    }
}

TEST_CASE("cadzow improves downstream delay estimation under noise") {
    // 1% sample noise, 100 seeded trials: the denoised path must win at
    // least 95 times
    std::mt19937_64 rng(67);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> delay(kPeriod / 40.0, kPeriod / 2.3);
    int cadzow_wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double t01 = delay(rng);
        auto clean = phaseless_samples(20, 5.0, 2.0, t01);
        auto noisy = clean;
        double peak = 0.0;
        for (const auto& v : clean.values) peak = std::max(peak, std::abs(v));
        for (auto& v : noisy.values) v += 0.01 * peak * gauss(rng);

        auto delay_error = [&](const UniformSpectrumSamples& input) {
            const ExponentialModel model =
                annihilating_filter(input, 3, SpectrumSymmetry::ConjugatePairs);
            double best = 1e300;
            for (const auto& comp : model.components)
                if (comp.delay_s > 0.0) best = std::min(best, std::abs(comp.delay_s - t01));
            return best;
        };

        const double with_cadzow = delay_error(cadzow_denoise(noisy, 3).samples);
        const double without = delay_error(noisy);
        if (with_cadzow < without) ++cadzow_wins;
    }
    CHECK(cadzow_wins >= 95);
}

TEST_CASE("cadzow completes at the experiment sample count") {
    // 41 samples (L = 20) with noise: finishes inside the iteration budget
    std::mt19937_64 rng(71);
    std::normal_distribution<double> gauss(0.0, 0.02);
    auto samples = phaseless_samples(20, 3.0, 1.2, 22e-9);
    for (auto& v : samples.values) v += gauss(rng);
    const auto start = std::chrono::steady_clock::now();
    const CadzowResult result = cadzow_denoise(samples, 3);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(result.iterations <= 50);
    CHECK(elapsed < 1.0);
}

TEST_CASE("annihilating filter recovers a single exponential exactly") {
    const double tau = 13.5e-9;
    const auto samples = exponential_sum(8, {cplx(1.0, 0.0)}, {tau});
    const ExponentialModel model = annihilating_filter(samples, 1);
    REQUIRE(model.components.size() == 1);
    CHECK(std::abs(delay_of(model, 0) - tau) < 1e-12 * kPeriod);
    CHECK_FALSE(model.low_confidence);
}

TEST_CASE("annihilating filter recovers the phase-less delay triplet") {
    const double t01 = 17.25e-9;
    const auto samples = phaseless_samples(20, 10.0, 3.0, t01);
    const ExponentialModel model = annihilating_filter(samples, 3, SpectrumSymmetry::ConjugatePairs);
    REQUIRE(model.components.size() == 3);
    // sorted by delay: {-t01, 0, +t01}
    CHECK(std::abs(delay_of(model, 0) + t01) < 1e-9 * kPeriod);
    CHECK(delay_of(model, 1) == 0.0);
    CHECK(std::abs(delay_of(model, 2) - t01) < 1e-9 * kPeriod);
}

TEST_CASE("recovered delays are invariant to global scaling") {
    const auto base = phaseless_samples(12, 4.0, 1.5, 26e-9);
    const ExponentialModel ref = annihilating_filter(base, 3, SpectrumSymmetry::ConjugatePairs);
    for (double alpha : {3.0, -0.2, 1e-6, 740.0}) {
        auto scaled = base;
        for (auto& v : scaled.values) v *= alpha;
        const ExponentialModel model =
            annihilating_filter(scaled, 3, SpectrumSymmetry::ConjugatePairs);
        REQUIRE(model.components.size() == ref.components.size());
        for (std::size_t i = 0; i < ref.components.size(); ++i)
            CHECK(std::abs(delay_of(model, i) - delay_of(ref, i)) < 1e-9 * kPeriod);
    }
}

TEST_CASE("annihilating filter is exact for noiseless sums of exponentials") {
    // 1000 random instances, M <= 5, delays separated by >= T/(4L)
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> ms(1, 5);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> pos(-0.5 * kPeriod, 0.5 * kPeriod);
    const int L = 12;
    const double min_sep = kPeriod / (4.0 * L);

    for (int trial = 0; trial < 1000; ++trial) {
        const int m = ms(rng);
        std::vector<double> delays;
        while (static_cast<int>(delays.size()) < m) {
            const double t = pos(rng);
            bool ok = true;
            for (double d : delays) {
                double dist = std::abs(d - t);
                dist = std::min(dist, kPeriod - dist);
                if (dist < min_sep) ok = false;
            }
            if (ok) delays.push_back(t);
        }
        std::vector<cplx> amplitudes;
        for (int i = 0; i < m; ++i) amplitudes.push_back(std::polar(mag(rng), phase(rng)));

        const auto samples = exponential_sum(L, amplitudes, delays);
        const ExponentialModel model = annihilating_filter(samples, m);
        REQUIRE(static_cast<int>(model.components.size()) == m);

        std::vector<double> expected = delays;
        std::sort(expected.begin(), expected.end());
        std::vector<double> got;
        for (const auto& comp : model.components) got.push_back(comp.delay_s);
        std::sort(got.begin(), got.end());
        for (int i = 0; i < m; ++i) {
            double d = std::abs(got[static_cast<std::size_t>(i)] - expected[static_cast<std::size_t>(i)]);
            d = std::min(d, kPeriod - d); // +T/2 and -T/2 are the same root
            CHECK(d < 1e-9 * kPeriod);
        }
    }
}

TEST_CASE("annihilating filter enforces the sample-count bound") {
    const auto samples = phaseless_samples(2, 4.0, 1.0, 20e-9); // 5 samples
    CHECK_THROWS_AS(annihilating_filter(samples, 3), ModelOrderMismatch); // needs 7
}

TEST_CASE("rank-deficient data trips the null-space check") {
    // constant data supports one exponential, not three
    const auto samples = phaseless_samples(10, 4.0, 0.0, 0.0);
    CHECK_THROWS_AS(annihilating_filter(samples, 3), ModelOrderMismatch);
}

TEST_CASE("amplitude fit is exact on noiseless data") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> delays = {-20e-9, -4e-9, 9e-9, 33e-9};
        std::vector<cplx> amplitudes;
        for (std::size_t i = 0; i < delays.size(); ++i)
            amplitudes.push_back(std::polar(mag(rng), phase(rng)));
        const auto samples = exponential_sum(10, amplitudes, delays);

        ExponentialModel model;
        model.omega0 = kOmega0;
        for (double d : delays) model.components.push_back({cplx(0.0, 0.0), d});
        const ExponentialModel fitted = fit_amplitudes(samples, model);
        for (std::size_t i = 0; i < delays.size(); ++i)
            CHECK(std::abs(fitted.components[i].amplitude - amplitudes[i]) <=
                  1e-9 * std::abs(amplitudes[i]));
        CHECK(fitted.fit_residual < 1e-9);
    }
}

TEST_CASE("zero samples fit zero amplitudes") {
    UniformSpectrumSamples zero;
    zero.omega0 = kOmega0;
    zero.bandlimit = 6;
    zero.values.assign(13, cplx(0.0, 0.0));
    ExponentialModel model;
    model.omega0 = kOmega0;
    model.components = {{cplx(0.0, 0.0), -8e-9}, {cplx(0.0, 0.0), 0.0}, {cplx(0.0, 0.0), 8e-9}};
    const ExponentialModel fitted = fit_amplitudes(zero, model);
    for (const auto& comp : fitted.components) CHECK(std::abs(comp.amplitude) < 1e-14);
}

TEST_CASE("fitted amplitudes come in conjugate pairs on real even data") {
    const auto samples = phaseless_samples(14, 6.0, 2.5, 21e-9);
    const ExponentialModel delays = annihilating_filter(samples, 3, SpectrumSymmetry::ConjugatePairs);
    const ExponentialModel fitted = fit_amplitudes(samples, delays);
    REQUIRE(fitted.components.size() == 3);
    const cplx neg = fitted.components[0].amplitude;
    const cplx dc = fitted.components[1].amplitude;
    const cplx pos = fitted.components[2].amplitude;
    CHECK(std::abs(neg - std::conj(pos)) < 1e-9 * std::abs(neg));
    CHECK(std::abs(dc.imag()) < 1e-9 * std::abs(dc));
}

TEST_CASE("nearly coincident delays raise a degeneracy error") {
    const auto samples = phaseless_samples(10, 4.0, 1.0, 20e-9);
    ExponentialModel model;
    model.omega0 = kOmega0;
    model.components = {{cplx(0.0, 0.0), 10e-9}, {cplx(0.0, 0.0), 10e-9 + kPeriod * 1e-13}};
    CHECK_THROWS_AS(fit_amplitudes(samples, model), NearDegenerateModel);
}

TEST_CASE("end-to-end spectral estimation reproduces the generating parameters") {
    // denoise -> annihilate -> fit on exact phase-less data
    const double a0 = 10.0, a01 = 3.0, t01 = 19e-9;
    const auto samples = phaseless_samples(20, a0, a01, t01);
    // measurement bound with margin: 2L+1 = 41 samples for 3 components
    REQUIRE(2 * samples.bandlimit + 1 >= 2 * 3 + 1);

    const CadzowResult denoised = cadzow_denoise(samples, 3);
    const ExponentialModel delays =
        annihilating_filter(denoised.samples, 3, SpectrumSymmetry::ConjugatePairs);
    const ExponentialModel fitted = fit_amplitudes(denoised.samples, delays);
    REQUIRE(fitted.components.size() == 3);

    CHECK(std::abs(fitted.components[1].delay_s) < 1e-12 * kPeriod);
    CHECK(std::abs(fitted.components[1].amplitude.real() - a0) < 1e-9 * a0);
    CHECK(std::abs(fitted.components[2].delay_s - t01) < 1e-9 * kPeriod);
    // each oscillatory component carries half the cosine amplitude
    CHECK(std::abs(std::abs(fitted.components[2].amplitude) - a01) < 1e-9 * a01);
    CHECK(std::abs(std::abs(fitted.components[0].amplitude) - a01) < 1e-9 * a01);
    // phases of the pair cancel for a pure cosine
    CHECK(std::abs(std::arg(fitted.components[2].amplitude)) < 1e-9);
}

TEST_CASE("samples validation") {
    UniformSpectrumSamples bad;
    bad.omega0 = kOmega0;
    bad.bandlimit = 3;
    bad.values.assign(6, cplx(0.0, 0.0)); // needs 7
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(cadzow_denoise(bad, 2), std::invalid_argument);
}

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <numbers>
#include <random>

#include "tofpr/deconvolve.hpp"
#include "tofpr/errors.hpp"
#include "tofpr/signal_core.hpp"
#include "test_util.hpp"

using namespace tofpr;
using namespace testutil;

namespace {

AcquisitionConfig small_config(int n = 96, int bandlimit = 10) {
    AcquisitionConfig cfg;
    cfg.n_samples = n;
    cfg.delta_s = 1e-9;
    cfg.period_s = n * cfg.delta_s;
    cfg.bandlimit = bandlimit;
    return cfg;
}

PulseSpectrum small_pulse(const AcquisitionConfig& cfg, double width_factor = 2.0) {
    const double sigma = width_factor * cfg.period_s / (2.0 * std::numbers::pi * cfg.bandlimit);
    return gaussian_pulse_spectrum(cfg.bandlimit, cfg.period_s, sigma);
}

} // namespace

TEST_CASE("system matrix is the sub-DFT matrix") {
    AcquisitionConfig cfg;
    cfg.n_samples = 4;
    cfg.delta_s = 1.0;
    cfg.period_s = 4.0;
    cfg.bandlimit = 1;
    const PulseSpectrum pulse(std::vector<cplx>{cplx(1, 0), cplx(1, 0), cplx(1, 0)});
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);

    const auto& u = sys.dft_matrix();
    REQUIRE(u.rows() == 4);
    REQUIRE(u.cols() == 3);
    for (int n = 0; n < 4; ++n)
        for (int ell = -1; ell <= 1; ++ell) {
            const double phase = 2.0 * std::numbers::pi * ell * n / 4.0;
            CHECK(std::abs(u(n, ell + 1) - cplx(std::cos(phase), std::sin(phase))) < 1e-15);
            CHECK(std::abs(std::abs(u(n, ell + 1)) - 1.0) < 1e-15); // unit modulus
        }
}

TEST_CASE("diagonal weights are the fourth power of the pulse spectrum") {
    const AcquisitionConfig cfg = small_config();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mag(0.2, 1.0);
    std::vector<cplx> coeffs(21);
    for (int ell = 0; ell <= 10; ++ell) {
        const cplx c = (ell == 0) ? cplx(mag(rng), 0.0) : cplx(mag(rng), mag(rng));
        coeffs[static_cast<std::size_t>(10 + ell)] = c;
        coeffs[static_cast<std::size_t>(10 - ell)] = std::conj(c);
    }
    const PulseSpectrum pulse(coeffs);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess, 0.0);
    REQUIRE(sys.effective_bandlimit() == 10);
    for (int ell = -10; ell <= 10; ++ell) {
        const double p2 = std::norm(pulse.coeff(ell));
        CHECK(sys.weights()[static_cast<std::size_t>(ell + 10)] == doctest::Approx(p2 * p2));
    }
}

TEST_CASE("orthogonal columns give unit condition number") {
    const AcquisitionConfig cfg = small_config();
    const MeasurementSystem sys = build_system(small_pulse(cfg), cfg, SystemPath::PhaseLess);
    CHECK(std::abs(sys.condition_number() - 1.0) < 1e-10);

    // column Gram matrix is N * I on an N*delta = T grid
    const auto& u = sys.dft_matrix();
    const Eigen::MatrixXcd gram = u.adjoint() * u;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = 0; j < gram.cols(); ++j) {
            const cplx expected = (i == j) ? cplx(cfg.n_samples, 0.0) : cplx(0.0, 0.0);
            CHECK(std::abs(gram(i, j) - expected) < 1e-9 * cfg.n_samples);
        }
}

TEST_CASE("degenerate grids are rejected") {
    AcquisitionConfig cfg;
    cfg.n_samples = 8;
    cfg.delta_s = 1.0;
    cfg.period_s = 2.0; // q = 4 cycles, N/gcd(8,4) = 4 <= 2L with L = 3
    cfg.bandlimit = 3;
    CHECK_THROWS_AS(build_system(small_pulse(cfg), cfg, SystemPath::PhaseLess),
                    std::invalid_argument);
}

TEST_CASE("weighted deconvolution round trip") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);
    REQUIRE(sys.effective_bandlimit() == cfg.bandlimit);

    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> ks(1, 4);
    for (int trial = 0; trial < 30; ++trial) {
        const SparseSRF srf = random_srf(rng, ks(rng), cfg.period_s, 2e-9);
        const MeasurementVector m = synthesize_phaseless(srf, pulse, cfg);
        const std::vector<double> s = estimate_s_hat(m, sys);
        REQUIRE(static_cast<int>(s.size()) == 2 * cfg.bandlimit + 1);
        for (int ell = -cfg.bandlimit; ell <= cfg.bandlimit; ++ell) {
            const double expected = s_hat_of_omega(srf, ell * cfg.omega0());
            CHECK(rel_err(s[static_cast<std::size_t>(ell + cfg.bandlimit)], expected) < 1e-8);
        }
    }
}

TEST_CASE("zero measurements give a zero spectrum") {
    const AcquisitionConfig cfg = small_config();
    const MeasurementSystem sys = build_system(small_pulse(cfg), cfg, SystemPath::PhaseLess);
    MeasurementVector zero{std::vector<double>(static_cast<std::size_t>(cfg.n_samples), 0.0), cfg,
                           MeasurementKind::PhaseLess};
    for (double v : estimate_s_hat(zero, sys)) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("deconvolution is linear") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);
    std::mt19937_64 rng(29);
    const SparseSRF srf1 = random_srf(rng, 2, cfg.period_s, 2e-9);
    const SparseSRF srf2 = random_srf(rng, 3, cfg.period_s, 2e-9);
    const auto m1 = synthesize_phaseless(srf1, pulse, cfg);
    const auto m2 = synthesize_phaseless(srf2, pulse, cfg);
    const double alpha = 1.7, beta = -0.4;

    MeasurementVector mixed = m1;
    for (int n = 0; n < cfg.n_samples; ++n)
        mixed.samples[static_cast<std::size_t>(n)] =
            alpha * m1.samples[static_cast<std::size_t>(n)] +
            beta * m2.samples[static_cast<std::size_t>(n)];

    const auto s1 = estimate_s_hat(m1, sys);
    const auto s2 = estimate_s_hat(m2, sys);
    const auto sm = estimate_s_hat(mixed, sys);
    double scale = 0.0;
    for (double v : sm) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < sm.size(); ++i)
        CHECK(std::abs(sm[i] - (alpha * s1[i] + beta * s2[i])) <= 1e-10 * scale);
}

TEST_CASE("recovered spectrum is real and even on noiseless data") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);
    std::mt19937_64 rng(37);
    const SparseSRF srf = random_srf(rng, 3, cfg.period_s, 2e-9);
    const auto s = estimate_s_hat(synthesize_phaseless(srf, pulse, cfg), sys);
    const int L = cfg.bandlimit;
    double scale = 0.0;
    for (double v : s) scale = std::max(scale, std::abs(v));
    for (int ell = 1; ell <= L; ++ell)
        CHECK(std::abs(s[static_cast<std::size_t>(L + ell)] - s[static_cast<std::size_t>(L - ell)]) <=
              1e-9 * scale);
}

TEST_CASE("weight floor shrinks the effective bandwidth") {
    // raised cosine: p_hat vanishes beyond |ell| = 1, so L shrinks to 1
    AcquisitionConfig cfg = small_config(96, 3);
    std::vector<cplx> coeffs(7, cplx(0.0, 0.0));
    coeffs[3] = cplx(1.0, 0.0);
    coeffs[2] = coeffs[4] = cplx(0.5, 0.0);
    const PulseSpectrum pulse(coeffs);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);
    CHECK(sys.effective_bandlimit() == 1);
    CHECK(sys.weights().size() == 3);

    // with the floor disabled the zero weight is retained and the solve refuses
    const MeasurementSystem unfloored = build_system(pulse, cfg, SystemPath::PhaseLess, 0.0);
    CHECK(unfloored.effective_bandlimit() == 3);
    MeasurementVector m{std::vector<double>(96, 1.0), cfg, MeasurementKind::PhaseLess};
    CHECK_THROWS_AS(estimate_s_hat(m, unfloored), IllConditionedSystem);
    try {
        estimate_s_hat(m, unfloored);
    } catch (const IllConditionedSystem& e) {
        CHECK(std::abs(e.ell) >= 2); // names an offending frequency
    }
}

TEST_CASE("non-autocorrelation data trips the imaginary-residue check") {
    const AcquisitionConfig cfg = small_config();
    const MeasurementSystem sys = build_system(small_pulse(cfg), cfg, SystemPath::PhaseLess);
    // a cyclically odd-ish signal has strongly complex sub-DFT coefficients
    MeasurementVector m{std::vector<double>(static_cast<std::size_t>(cfg.n_samples), 0.0), cfg,
                        MeasurementKind::PhaseLess};
    m.samples[1] = 1.0;
    m.samples[95] = -1.0;
    m.samples[2] = 2.0;
    CHECK_THROWS_AS(estimate_s_hat(m, sys), DataInconsistency);
}

TEST_CASE("kind and path mismatches are rejected") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys_s = build_system(pulse, cfg, SystemPath::PhaseLess);
    const MeasurementSystem sys_h = build_system(pulse, cfg, SystemPath::PhaseIntact);
    SparseSRF srf{{{cplx(1.0, 0.0), 5e-9}}};
    const MeasurementVector y = synthesize_phaseintact(srf, pulse, cfg);
    const MeasurementVector m = synthesize_phaseless(srf, pulse, cfg);

    CHECK_THROWS_AS(estimate_s_hat(y, sys_s), std::invalid_argument);  // wrong kind
    CHECK_THROWS_AS(estimate_h_hat(m, sys_h), std::invalid_argument);  // wrong kind
    CHECK_THROWS_AS(estimate_s_hat(m, sys_h), std::invalid_argument);  // wrong path
}

TEST_CASE("oracle-path deconvolution recovers the complex spectrum") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseIntact);
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const SparseSRF srf = random_srf(rng, 2, cfg.period_s, 2e-9);
        const MeasurementVector y = synthesize_phaseintact(srf, pulse, cfg);
        const std::vector<cplx> h = estimate_h_hat(y, sys);
        for (int ell = -cfg.bandlimit; ell <= cfg.bandlimit; ++ell) {
            const cplx expected = h_hat_of_omega(srf, ell * cfg.omega0());
            CHECK(std::abs(h[static_cast<std::size_t>(ell + cfg.bandlimit)] - expected) <=
                  1e-8 * std::abs(expected));
        }
    }

    // a zero-delay single echo has a constant spectrum
    SparseSRF flat{{{cplx(2.0, 0.0), 0.0}}};
    const auto h = estimate_h_hat(synthesize_phaseintact(flat, pulse, cfg), sys);
    for (const auto& v : h) CHECK(std::abs(v - cplx(2.0, 0.0)) < 1e-9);
}

TEST_CASE("squared oracle spectrum equals the phase-less spectrum") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys_s = build_system(pulse, cfg, SystemPath::PhaseLess);
    const MeasurementSystem sys_h = build_system(pulse, cfg, SystemPath::PhaseIntact);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const SparseSRF srf = random_srf(rng, 2, cfg.period_s, 2e-9);
        const auto s = estimate_s_hat(synthesize_phaseless(srf, pulse, cfg), sys_s);
        const auto h = estimate_h_hat(synthesize_phaseintact(srf, pulse, cfg), sys_h);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(rel_err(std::norm(h[i]), s[i]) < 1e-6);
    }
}

TEST_CASE("experiment-scale system solves well under a second") {
    const AcquisitionConfig cfg = AcquisitionConfig::experiment_preset();
    const double sigma = cfg.period_s / (std::numbers::pi * cfg.bandlimit);
    const PulseSpectrum pulse = gaussian_pulse_spectrum(cfg.bandlimit, cfg.period_s, sigma);
    const MeasurementSystem sys = build_system(pulse, cfg, SystemPath::PhaseLess);
    REQUIRE(sys.effective_bandlimit() == 20); // all 41 bins retained

    SparseSRF srf{{{cplx(1.0, 0.0), 0.3 * cfg.period_s}, {cplx(0.4, 0.0), 0.62 * cfg.period_s}}};
    const MeasurementVector m = synthesize_phaseless(srf, pulse, cfg);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> s = estimate_s_hat(m, sys);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(elapsed < 1.0);
    for (int ell = -20; ell <= 20; ++ell)
        CHECK(rel_err(s[static_cast<std::size_t>(ell + 20)], s_hat_of_omega(srf, ell * cfg.omega0())) <
              1e-8);
}

TEST_CASE("resynthesis reproduces the forward model") {
    const AcquisitionConfig cfg = small_config();
    const PulseSpectrum pulse = small_pulse(cfg);
    const MeasurementSystem sys_s = build_system(pulse, cfg, SystemPath::PhaseLess);
    const MeasurementSystem sys_h = build_system(pulse, cfg, SystemPath::PhaseIntact);
    std::mt19937_64 rng(53);
    const SparseSRF srf = random_srf(rng, 2, cfg.period_s, 2e-9);

    std::vector<double> s(21);
    std::vector<cplx> h(21);
    for (int ell = -10; ell <= 10; ++ell) {
        s[static_cast<std::size_t>(ell + 10)] = s_hat_of_omega(srf, ell * cfg.omega0());
        h[static_cast<std::size_t>(ell + 10)] = h_hat_of_omega(srf, ell * cfg.omega0());
    }
    const auto m_direct = synthesize_phaseless(srf, pulse, cfg).samples;
    const auto y_direct = synthesize_phaseintact(srf, pulse, cfg).samples;
    const auto m_resynth = sys_s.resynthesize(std::span<const double>(s));
    const auto y_resynth = sys_h.resynthesize(std::span<const cplx>(h));
    for (int n = 0; n < cfg.n_samples; ++n) {
        CHECK(std::abs(m_resynth[static_cast<std::size_t>(n)] - m_direct[static_cast<std::size_t>(n)]) <
              1e-10 * max_abs(m_direct));
        CHECK(std::abs(y_resynth[static_cast<std::size_t>(n)] - y_direct[static_cast<std::size_t>(n)]) <
              1e-10 * max_abs(y_direct));
    }
}

// SPDX-License-Identifier: Apache-2.0
#include "tofpr/signal_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "tofpr/errors.hpp"

namespace tofpr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Direct lag sum, kept for small inputs where exactness beats speed.
std::vector<double> autocorr_direct(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> a(n, 0.0);
    for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[(i + lag) % n];
        a[lag] = acc;
    }
    return a;
}

std::vector<double> autocorr_fft(std::span<const double> x) {
    const std::size_t n = x.size();
    Eigen::FFT<double> fft;
    std::vector<cplx> in(n), spec(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = cplx(x[i], 0.0);
    fft.fwd(spec, in);
    for (auto& v : spec) v = cplx(std::norm(v), 0.0);
    std::vector<cplx> out(n);
    fft.inv(out, spec);
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = out[i].real();
    // the power spectrum is real, so the lag sequence is exactly even
    for (std::size_t i = 1; i < n - i; ++i) {
        const double v = 0.5 * (a[i] + a[n - i]);
        a[i] = v;
        a[n - i] = v;
    }
    return a;
}

} // namespace

std::vector<double> cyclic_autocorrelation(std::span<const double> x) {
    if (x.empty())
        throw std::invalid_argument("cyclic_autocorrelation: empty input");
    if (x.size() <= 64) return autocorr_direct(x);
    return autocorr_fft(x);
}

PulseSpectrum pulse_spectrum_from_samples(std::span<const double> p, const AcquisitionConfig& config) {
    config.validate();
    const int L = config.bandlimit;
    const std::size_t n = p.size();
    if (n < static_cast<std::size_t>(2 * L + 1))
        throw std::invalid_argument("pulse_spectrum_from_samples: need at least 2L+1 samples, got " +
                                    std::to_string(n));
    std::vector<cplx> coeffs(static_cast<std::size_t>(2 * L + 1));
    for (int ell = -L; ell <= L; ++ell) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = -kTwoPi * ell * static_cast<double>(i) / static_cast<double>(n);
            acc += p[i] * cplx(std::cos(phase), std::sin(phase));
        }
        coeffs[static_cast<std::size_t>(ell + L)] = acc / static_cast<double>(n);
    }
    return PulseSpectrum(std::move(coeffs));
}

PulseSpectrum gaussian_pulse_spectrum(int bandlimit, double period_s, double sigma_s) {
    if (bandlimit <= 0 || period_s <= 0.0 || sigma_s <= 0.0)
        throw std::invalid_argument("gaussian_pulse_spectrum: parameters must be positive");
    const double w0 = kTwoPi / period_s;
    std::vector<cplx> coeffs(static_cast<std::size_t>(2 * bandlimit + 1));
    for (int ell = -bandlimit; ell <= bandlimit; ++ell) {
        const double arg = ell * w0 * sigma_s;
        coeffs[static_cast<std::size_t>(ell + bandlimit)] = cplx(std::exp(-0.5 * arg * arg), 0.0);
    }
    return PulseSpectrum(std::move(coeffs));
}

std::vector<double> periodized_gaussian_pulse(int sample_count, double period_s, double sigma_s) {
    if (sample_count <= 0 || period_s <= 0.0 || sigma_s <= 0.0)
        throw std::invalid_argument("periodized_gaussian_pulse: parameters must be positive");
    std::vector<double> p(static_cast<std::size_t>(sample_count), 0.0);
    const double dt = period_s / sample_count;
    // wrap enough neighbour periods that truncation is below double precision
    const int wraps = static_cast<int>(std::ceil(9.0 * sigma_s / period_s)) + 1;
    const double norm = 1.0 / (sigma_s * std::sqrt(kTwoPi));
    for (int i = 0; i < sample_count; ++i) {
        const double t = i * dt;
        double acc = 0.0;
        for (int m = -wraps; m <= wraps; ++m) {
            const double d = t - m * period_s;
            acc += std::exp(-0.5 * d * d / (sigma_s * sigma_s));
        }
        p[static_cast<std::size_t>(i)] = norm * acc;
    }
    return p;
}

cplx h_hat_of_omega(const SparseSRF& srf, double omega) {
    cplx acc(0.0, 0.0);
    for (const auto& e : srf.echoes) {
        const double phase = omega * e.delay_s;
        acc += e.amplitude * cplx(std::cos(phase), std::sin(phase));
    }
    return acc;
}

double s_hat_of_omega(const SparseSRF& srf, double omega) {
    return std::norm(h_hat_of_omega(srf, omega));
}

double marginalize(const SparseSRF& srf) {
    cplx acc(0.0, 0.0);
    for (const auto& e : srf.echoes) acc += e.amplitude;
    return acc.real();
}

namespace {

// Shared synthesis kernel: x[n] = Re sum_ell coeff_ell exp(j ell w0 n delta),
// with a residue check on the discarded imaginary part.
std::vector<double> synthesize_from_line_spectrum(const std::vector<cplx>& coeff,
                                                  const AcquisitionConfig& config) {
    const int L = static_cast<int>(coeff.size() / 2);
    const int n = config.n_samples;
    const double w0d = config.omega0() * config.delta_s;
    std::vector<double> out(static_cast<std::size_t>(n));
    double max_im = 0.0;
    double max_re = 0.0;
    for (int i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        for (int ell = -L; ell <= L; ++ell) {
            const double phase = w0d * ell * i;
            acc += coeff[static_cast<std::size_t>(ell + L)] * cplx(std::cos(phase), std::sin(phase));
        }
        max_im = std::max(max_im, std::abs(acc.imag()));
        max_re = std::max(max_re, std::abs(acc.real()));
        out[static_cast<std::size_t>(i)] = acc.real();
    }
    if (max_im > 1e-9 * std::max(max_re, 1e-300))
        throw DataInconsistency("synthesis produced a non-real signal (imaginary residue " +
                                std::to_string(max_im) + "); amplitudes must be real for a physical sensor");
    return out;
}

void check_bandlimits(const PulseSpectrum& pulse, const AcquisitionConfig& config) {
    config.validate();
    if (pulse.bandlimit() != config.bandlimit)
        throw std::invalid_argument("pulse bandlimit L=" + std::to_string(pulse.bandlimit()) +
                                    " does not match config L=" + std::to_string(config.bandlimit));
}

} // namespace

MeasurementVector synthesize_phaseintact(const SparseSRF& srf, const PulseSpectrum& pulse,
                                         const AcquisitionConfig& config) {
    check_bandlimits(pulse, config);
    srf.validate(config.period_s);
    const int L = config.bandlimit;
    const double w0 = config.omega0();
    const auto phi = pulse.power_weights();
    std::vector<cplx> coeff(static_cast<std::size_t>(2 * L + 1));
    for (int ell = -L; ell <= L; ++ell)
        coeff[static_cast<std::size_t>(ell + L)] =
            phi[static_cast<std::size_t>(ell + L)] * std::conj(h_hat_of_omega(srf, ell * w0));
    return MeasurementVector{synthesize_from_line_spectrum(coeff, config), config,
                             MeasurementKind::PhaseIntact};
}

MeasurementVector synthesize_phaseless(const SparseSRF& srf, const PulseSpectrum& pulse,
                                       const AcquisitionConfig& config) {
    check_bandlimits(pulse, config);
    srf.validate(config.period_s);
    const int L = config.bandlimit;
    const double w0 = config.omega0();
    const auto psi = pulse.fourth_power_weights();
    std::vector<cplx> coeff(static_cast<std::size_t>(2 * L + 1));
    for (int ell = -L; ell <= L; ++ell)
        coeff[static_cast<std::size_t>(ell + L)] =
            cplx(psi[static_cast<std::size_t>(ell + L)] * s_hat_of_omega(srf, ell * w0), 0.0);
    return MeasurementVector{synthesize_from_line_spectrum(coeff, config), config,
                             MeasurementKind::PhaseLess};
}

} // namespace tofpr

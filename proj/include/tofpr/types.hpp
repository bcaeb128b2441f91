// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace tofpr {

using cplx = std::complex<double>;

/// Uniform acquisition grid for one measurement vector.
///
/// N samples spaced delta_s seconds apart, probing pulse period period_s,
/// spectrum bandlimited to |ell| <= bandlimit. The fundamental frequency is
/// derived, omega0 = 2*pi/period_s, and the grid must cover an integer
/// number of pulse periods so the cyclic model is exact.
struct AcquisitionConfig {
    int n_samples = 0;     // N
    double delta_s = 0.0;  // sampling interval, seconds
    double period_s = 0.0; // pulse period T, seconds
    int bandlimit = 0;     // L

    double omega0() const { return 2.0 * std::numbers::pi / period_s; }

    /// Number of pulse periods covered by the grid (N*delta/T), rounded.
    int cycles() const;

    /// Throws std::invalid_argument if any structural invariant is violated:
    /// positive sizes, 2L+1 <= N, and N*delta an integer multiple of T.
    void validate() const;

    /// Mirrors the hardware experiment: delta = 70 ps, N = 2795, L = 20,
    /// T = N*delta so the grid spans exactly one period.
    static AcquisitionConfig experiment_preset();
};

/// Fourier coefficients p_hat of the real T-periodic probing pulse,
/// ell = -L..L stored at index ell+L. Hermitian symmetry is enforced at
/// construction (the pulse is real).
class PulseSpectrum {
public:
    PulseSpectrum() = default;
    explicit PulseSpectrum(std::vector<cplx> coefficients);

    int bandlimit() const { return static_cast<int>(coefficients_.size() / 2); }
    const std::vector<cplx>& coefficients() const { return coefficients_; }
    cplx coeff(int ell) const { return coefficients_[static_cast<std::size_t>(ell + bandlimit())]; }

    /// phi_hat_ell = |p_hat_ell|^2, the weights of the pulse autocorrelation.
    std::vector<double> power_weights() const;
    /// psi_hat_ell = |p_hat_ell|^4, the weights after a second autocorrelation.
    std::vector<double> fourth_power_weights() const;

private:
    std::vector<cplx> coefficients_;
};

/// One light echo: complex amplitude (reflectivity, phases allowed for
/// spectral tests) at a delay within one pulse period.
struct Echo {
    cplx amplitude;
    double delay_s = 0.0;
};

/// K-sparse scene response: echoes sorted by strictly increasing delay.
struct SparseSRF {
    std::vector<Echo> echoes;

    int sparsity() const { return static_cast<int>(echoes.size()); }

    /// Throws std::invalid_argument unless K >= 1, delays are strictly
    /// increasing, and every delay lies in [0, period).
    void validate(double period_s) const;
};

enum class MeasurementKind : std::uint8_t {
    PhaseIntact, // y: lock-in samples, Fourier phases preserved
    PhaseLess    // m: cyclic autocorrelation of y, phases destroyed
};

/// N uniform real sensor samples plus the grid they were taken on.
struct MeasurementVector {
    std::vector<double> samples;
    AcquisitionConfig config;
    MeasurementKind kind = MeasurementKind::PhaseIntact;
};

} // namespace tofpr

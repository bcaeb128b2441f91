// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "tofpr/types.hpp"

namespace tofpr {

/// Cyclic autocorrelation a[n] = sum_i x[i]*x[(i+n) mod N].
///
/// No 1/N factor is applied; the output is cyclically even and peaks at
/// lag zero. Computed via FFT for large N, so expect ~1e-13 relative
/// roundoff rather than integer-exact sums.
std::vector<double> cyclic_autocorrelation(std::span<const double> x);

/// Lowest 2L+1 Fourier-series coefficients of one pulse period sampled
/// uniformly at p.size() points. This is the least-squares trigonometric
/// approximation of order L on the sample grid.
/// Throws std::invalid_argument when fewer than 2L+1 samples are given.
PulseSpectrum pulse_spectrum_from_samples(std::span<const double> p, const AcquisitionConfig& config);

/// Closed-form spectrum of a periodized unit-mass Gaussian pulse of width
/// sigma: p_hat_ell = exp(-(ell*omega0*sigma)^2/2). Used as the default
/// synthetic probe; positive, smooth, monotonically decaying coefficients.
PulseSpectrum gaussian_pulse_spectrum(int bandlimit, double period_s, double sigma_s);

/// One period of the periodized Gaussian pulse on a uniform grid, for
/// feeding pulse_spectrum_from_samples.
std::vector<double> periodized_gaussian_pulse(int sample_count, double period_s, double sigma_s);

/// Phase-intact SRF spectrum h_hat(omega) = sum_k Gamma_k * exp(j*omega*t_k).
cplx h_hat_of_omega(const SparseSRF& srf, double omega);

/// Phase-less SRF spectrum s_hat(omega) = |h_hat(omega)|^2
///  = a0 + 2 * sum_{k<m} a_km * cos(omega*t_km + phase_km),
/// a0 = sum |Gamma_k|^2, a_km = |Gamma_k||Gamma_m|, t_km = t_k - t_m.
double s_hat_of_omega(const SparseSRF& srf, double omega);

/// Conventional photograph intensity: sum_k Gamma_k (real part; physical
/// scenes carry real reflectivities).
double marginalize(const SparseSRF& srf);

/// Lock-in samples y[n] = sum_{|ell|<=L} phi_hat_ell * conj(h_hat(ell*omega0))
/// * exp(j*ell*omega0*n*delta), real part. The imaginary residue must stay
/// below 1e-9 of the signal scale (guaranteed for real amplitudes); a larger
/// residue throws DataInconsistency.
/// Throws std::invalid_argument when pulse and config disagree on L.
MeasurementVector synthesize_phaseintact(const SparseSRF& srf, const PulseSpectrum& pulse,
                                         const AcquisitionConfig& config);

/// Autocorrelated samples m[n] = sum_{|ell|<=L} psi_hat_ell * s_hat(ell*omega0)
/// * exp(j*ell*omega0*n*delta). Real and cyclically even by construction.
/// When N*delta = T this equals cyclic_autocorrelation(synthesize_phaseintact)
/// divided by N (the discrete lag sum picks up one factor of N).
MeasurementVector synthesize_phaseless(const SparseSRF& srf, const PulseSpectrum& pulse,
                                       const AcquisitionConfig& config);

} // namespace tofpr

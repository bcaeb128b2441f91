// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "tofpr/types.hpp"

namespace tofpr {

/// Uniform Fourier-domain samples v_ell at omega = ell*omega0, ell = -L..L.
struct UniformSpectrumSamples {
    std::vector<cplx> values; // size 2L+1, index ell+L
    double omega0 = 0.0;
    int bandlimit = 0;

    cplx at(int ell) const { return values[static_cast<std::size_t>(ell + bandlimit)]; }
    void validate() const;
};

/// One term of a sum of complex exponentials: the ell-th sample contribution
/// is amplitude * exp(-j*ell*omega0*delay_s).
struct ExponentialComponent {
    cplx amplitude{0.0, 0.0};
    double delay_s = 0.0;
};

/// Estimated exponential-sum model of a uniform sample sequence.
/// Delays are distinct and live in (-T/2, T/2]; models fitted to real even
/// data carry conjugate pairs plus an optional real DC term at delay 0.
struct ExponentialModel {
    std::vector<ExponentialComponent> components;
    double omega0 = 0.0;
    /// Set when roots strayed off the unit circle or could not be paired.
    bool low_confidence = false;
    /// L2 residual of the amplitude fit (set by fit_amplitudes).
    double fit_residual = 0.0;
};

struct CadzowOptions {
    int max_iters = 50;
    double tol = 1e-10; // target trailing singular-value ratio sigma_{R+1}/sigma_1
};

struct CadzowResult {
    UniformSpectrumSamples samples;
    int iterations = 0;
    double singular_ratio = 0.0;
    /// Frobenius distance of the iterate's Hankel matrix to the rank-R set,
    /// one entry per SVD evaluation; non-increasing for alternating projections.
    std::vector<double> rank_distance_history;
};

/// Structured low-rank denoising: alternate between rank-R truncation of the
/// (L+1) x (L+1) Hankel matrix of the samples and anti-diagonal averaging back
/// to Hankel form, until the trailing singular-value ratio reaches tol or the
/// iteration budget runs out (stalled iterates also stop early).
/// Throws std::invalid_argument when rank < 1 or rank >= L+1.
CadzowResult cadzow_denoise(const UniformSpectrumSamples& samples, int rank,
                            const CadzowOptions& options = {});

enum class SpectrumSymmetry : std::uint8_t {
    None,          // keep roots as found (complex data, oracle path)
    ConjugatePairs // real even data: pair roots, snap the leftover to DC
};

/// Annihilating-filter (Prony) delay recovery: the filter coefficients span
/// the null space of the Toeplitz system built from the samples; the filter
/// roots r map to delays f = -arg(r)/omega0. Amplitudes are left unset.
///
/// Requires 2L+1 >= 2M+1 samples (ModelOrderMismatch otherwise); a null space
/// of dimension > 1 on noiseless data also raises ModelOrderMismatch. Roots
/// far off the unit circle (|log|r|| > 0.2) or unpairable under
/// ConjugatePairs mark the result low-confidence instead of failing.
ExponentialModel annihilating_filter(const UniformSpectrumSamples& samples, int model_order,
                                     SpectrumSymmetry symmetry = SpectrumSymmetry::None);

/// Least-squares amplitudes for fixed delays (Vandermonde system V c = v),
/// with the residual norm recorded on the returned model.
/// Throws NearDegenerateModel when delays nearly coincide (condition number
/// above 1e10).
ExponentialModel fit_amplitudes(const UniformSpectrumSamples& samples, const ExponentialModel& model);

} // namespace tofpr

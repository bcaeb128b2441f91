// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "tofpr/spectral.hpp"
#include "tofpr/types.hpp"

namespace tofpr {

/// One cross term of the phase-less spectrum expansion. For echoes k and m,
/// a_km carries the full cosine amplitude 2*|Gamma_k|*|Gamma_m| (the two-echo
/// closed form absorbs the factor 2 into a01), t_km = |t_k - t_m| and
/// phase_km the relative amplitude phase under the positive-delay convention.
struct CrossTerm {
    double a_km = 0.0;
    double t_km = 0.0;
    double phase_km = 0.0;
};

/// Parameter set {a0, (a_km, t_km, phase_km)} of an autocorrelated K-sparse
/// scene: a0 = sum |Gamma_k|^2, plus one cross term per echo pair.
struct AutocorrParams {
    double a0 = 0.0;
    std::vector<CrossTerm> cross_terms;
};

enum class MagnitudeOrdering : std::uint8_t { ByMagnitudeDescending };

/// Recovered per-pixel echo magnitudes. The phase-less path cannot attribute
/// which magnitude belongs to the earlier echo, so they are sorted descending.
struct EchoMagnitudes {
    std::vector<double> magnitudes;
    MagnitudeOrdering ordering = MagnitudeOrdering::ByMagnitudeDescending;
    /// Set when noise pushed a01 above a0 and the estimate was clamped back.
    bool clamped = false;
};

/// Maps a fitted exponential model of s_hat samples to physical parameters:
/// the DC component gives a0, each conjugate pair one cross term with
/// a_km = |c_neg| + |c_pos| (= 2|c| for exact pairs).
/// Throws ModelOrderMismatch when the DC term is missing or duplicated,
/// InconsistentSpectrum when the DC amplitude is negative/complex or a
/// component cannot be paired.
AutocorrParams identify_parameters(const ExponentialModel& model);

/// Closed-form two-echo magnitude recovery:
///   |Gamma_{0,1}| = (sqrt(a0 + a01) +/- sqrt(a0 - a01)) / 2.
/// The sum-of-squares a0 dominates the product term a01 for any physical
/// scene, so both radicands are nonnegative; if estimation noise violates
/// that, a01 is clamped to a0 and the result flagged.
/// Throws WrongArity unless exactly one cross term is present,
/// InconsistentSpectrum when a0 <= 0.
EchoMagnitudes resolve_magnitudes_k2(const AutocorrParams& params);

/// Ground-truth path: spectral estimation (Cadzow rank K, annihilating filter
/// order K, amplitude fit) directly on phase-intact h_hat samples, giving the
/// full {Gamma_k, t_k} with delays reduced into [0, T).
SparseSRF oracle_extract(std::span<const cplx> h_hat, const AcquisitionConfig& config, int echo_count);

} // namespace tofpr

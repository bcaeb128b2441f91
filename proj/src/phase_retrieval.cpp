// SPDX-License-Identifier: Apache-2.0
#include "tofpr/phase_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tofpr/errors.hpp"

namespace tofpr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

AutocorrParams identify_parameters(const ExponentialModel& model) {
    if (model.components.empty())
        throw std::invalid_argument("identify_parameters: empty model");
    if (model.omega0 <= 0.0)
        throw std::invalid_argument("identify_parameters: model carries no omega0");
    const double period = kTwoPi / model.omega0;
    const double dc_tol = period * 1e-9;

    const ExponentialComponent* dc = nullptr;
    std::vector<const ExponentialComponent*> oscillatory;
    for (const auto& comp : model.components) {
        if (std::abs(comp.delay_s) < dc_tol) {
            if (dc != nullptr)
                throw ModelOrderMismatch("identify_parameters: more than one constant term");
            dc = &comp;
        } else {
            oscillatory.push_back(&comp);
        }
    }
    if (dc == nullptr)
        throw ModelOrderMismatch("identify_parameters: missing constant term a0");

    const double dc_mag = std::abs(dc->amplitude);
    if (std::abs(dc->amplitude.imag()) > 1e-6 * std::max(dc_mag, 1e-300))
        throw InconsistentSpectrum("identify_parameters: constant term is complex beyond tolerance");
    AutocorrParams params;
    params.a0 = dc->amplitude.real();
    if (params.a0 <= 0.0)
        throw InconsistentSpectrum("identify_parameters: constant term a0 = " +
                                   std::to_string(params.a0) + " must be positive");

    // pair components at +/-t; sorted by delay, partners sit symmetrically
    std::sort(oscillatory.begin(), oscillatory.end(),
              [](const ExponentialComponent* a, const ExponentialComponent* b) {
                  return a->delay_s < b->delay_s;
              });
    std::size_t lo = 0;
    std::size_t hi = oscillatory.size();
    while (lo < hi) {
        const ExponentialComponent* neg = oscillatory[lo];
        const ExponentialComponent* pos = oscillatory[hi - 1];
        if (lo == hi - 1 || neg->delay_s >= 0.0 || pos->delay_s <= 0.0 ||
            std::abs(neg->delay_s + pos->delay_s) >
                1e-6 * std::max(std::abs(neg->delay_s), std::abs(pos->delay_s)))
            throw InconsistentSpectrum(
                "identify_parameters: oscillatory component at delay " +
                std::to_string(neg->delay_s) + " s has no conjugate partner");
        CrossTerm term;
        term.a_km = std::abs(neg->amplitude) + std::abs(pos->amplitude);
        term.t_km = 0.5 * (pos->delay_s - neg->delay_s);
        term.phase_km = std::arg(neg->amplitude);
        params.cross_terms.push_back(term);
        ++lo;
        --hi;
    }
    std::sort(params.cross_terms.begin(), params.cross_terms.end(),
              [](const CrossTerm& a, const CrossTerm& b) { return a.t_km < b.t_km; });
    return params;
}

EchoMagnitudes resolve_magnitudes_k2(const AutocorrParams& params) {
    if (params.cross_terms.size() != 1)
        throw WrongArity("resolve_magnitudes_k2: expected exactly one cross term, got " +
                         std::to_string(params.cross_terms.size()) +
                         " (the general-K path is a separate method)");
    if (params.a0 <= 0.0)
        throw InconsistentSpectrum("resolve_magnitudes_k2: a0 must be positive");

    double a01 = params.cross_terms.front().a_km;
    EchoMagnitudes result;
    if (a01 > params.a0) {
        a01 = params.a0;
        result.clamped = true;
    }
    const double s = std::sqrt(params.a0 + a01);
    const double d = std::sqrt(params.a0 - a01);
    result.magnitudes = {0.5 * (s + d), 0.5 * (s - d)};
    return result;
}

SparseSRF oracle_extract(std::span<const cplx> h_hat, const AcquisitionConfig& config,
                         int echo_count) {
    config.validate();
    if (h_hat.empty() || h_hat.size() % 2 == 0)
        throw std::invalid_argument("oracle_extract: need an odd number of spectrum samples");
    if (echo_count < 1)
        throw std::invalid_argument("oracle_extract: echo_count must be at least 1");

    UniformSpectrumSamples samples;
    samples.values.assign(h_hat.begin(), h_hat.end());
    samples.omega0 = config.omega0();
    samples.bandlimit = static_cast<int>(h_hat.size() / 2);

    const CadzowResult denoised = cadzow_denoise(samples, echo_count);
    ExponentialModel model =
        annihilating_filter(denoised.samples, echo_count, SpectrumSymmetry::None);
    model = fit_amplitudes(denoised.samples, model);

    // h_hat(omega) = sum Gamma_k exp(+j omega t_k) is an exponential sum with
    // component delays f = -t_k; undo the sign and reduce into [0, T)
    SparseSRF srf;
    for (const auto& comp : model.components) {
        double t = -comp.delay_s;
        t -= config.period_s * std::floor(t / config.period_s);
        if (t >= config.period_s) t = 0.0;
        srf.echoes.push_back({comp.amplitude, t});
    }
    std::sort(srf.echoes.begin(), srf.echoes.end(),
              [](const Echo& a, const Echo& b) { return a.delay_s < b.delay_s; });
    srf.validate(config.period_s);
    return srf;
}

} // namespace tofpr

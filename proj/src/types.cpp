// SPDX-License-Identifier: Apache-2.0
#include "tofpr/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tofpr {

int AcquisitionConfig::cycles() const {
    return static_cast<int>(std::llround(static_cast<double>(n_samples) * delta_s / period_s));
}

void AcquisitionConfig::validate() const {
    if (n_samples <= 0)
        throw std::invalid_argument("AcquisitionConfig: n_samples must be positive");
    if (delta_s <= 0.0)
        throw std::invalid_argument("AcquisitionConfig: delta_s must be positive");
    if (period_s <= 0.0)
        throw std::invalid_argument("AcquisitionConfig: period_s must be positive");
    if (bandlimit <= 0)
        throw std::invalid_argument("AcquisitionConfig: bandlimit must be positive");
    if (2 * bandlimit + 1 > n_samples)
        throw std::invalid_argument("AcquisitionConfig: need 2L+1 <= N, got L=" +
                                    std::to_string(bandlimit) + ", N=" + std::to_string(n_samples));
    const double span = static_cast<double>(n_samples) * delta_s;
    const double q = span / period_s;
    if (q < 0.5 || std::abs(q - std::round(q)) > 1e-9 * q)
        throw std::invalid_argument("AcquisitionConfig: N*delta must be an integer multiple of T "
                                    "(cyclic model exactness); got N*delta/T=" + std::to_string(q));
}

AcquisitionConfig AcquisitionConfig::experiment_preset() {
    AcquisitionConfig cfg;
    cfg.n_samples = 2795;
    cfg.delta_s = 70e-12;
    cfg.bandlimit = 20;
    cfg.period_s = static_cast<double>(cfg.n_samples) * cfg.delta_s;
    return cfg;
}

PulseSpectrum::PulseSpectrum(std::vector<cplx> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty() || coefficients_.size() % 2 == 0)
        throw std::invalid_argument("PulseSpectrum: need an odd number of coefficients (ell = -L..L)");
    const int L = bandlimit();
    double scale = 0.0;
    for (const auto& c : coefficients_) scale = std::max(scale, std::abs(c));
    for (int ell = 1; ell <= L; ++ell) {
        const cplx pos = coefficients_[static_cast<std::size_t>(L + ell)];
        const cplx neg = coefficients_[static_cast<std::size_t>(L - ell)];
        if (std::abs(neg - std::conj(pos)) > 1e-9 * scale)
            throw std::invalid_argument("PulseSpectrum: coefficients violate Hermitian symmetry at ell=" +
                                        std::to_string(ell) + " (pulse must be real)");
        // symmetrize exactly so derived weights are even in ell
        const cplx avg = 0.5 * (pos + std::conj(neg));
        coefficients_[static_cast<std::size_t>(L + ell)] = avg;
        coefficients_[static_cast<std::size_t>(L - ell)] = std::conj(avg);
    }
    auto& dc = coefficients_[static_cast<std::size_t>(L)];
    dc = cplx(dc.real(), 0.0);
}

std::vector<double> PulseSpectrum::power_weights() const {
    std::vector<double> w(coefficients_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::norm(coefficients_[i]);
    return w;
}

std::vector<double> PulseSpectrum::fourth_power_weights() const {
    std::vector<double> w(coefficients_.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double p2 = std::norm(coefficients_[i]);
        w[i] = p2 * p2;
    }
    return w;
}

void SparseSRF::validate(double period_s) const {
    if (echoes.empty())
        throw std::invalid_argument("SparseSRF: need at least one echo");
    double prev = -1.0;
    for (const auto& e : echoes) {
        if (e.delay_s < 0.0 || e.delay_s >= period_s)
            throw std::invalid_argument("SparseSRF: delays must lie in [0, T)");
        if (e.delay_s <= prev)
            throw std::invalid_argument("SparseSRF: delays must be strictly increasing");
        prev = e.delay_s;
    }
}

} // namespace tofpr

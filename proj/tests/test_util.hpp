// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "tofpr/types.hpp"

namespace testutil {

using tofpr::cplx;

// independent lag-sum oracle for the FFT-backed implementation
inline std::vector<double> brute_force_autocorrelation(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> a(n, 0.0);
    for (std::size_t lag = 0; lag < n; ++lag)
        for (std::size_t i = 0; i < n; ++i) a[lag] += x[i] * x[(i + lag) % n];
    return a;
}

inline cplx dft_bin(std::span<const double> x, int ell) {
    const std::size_t n = x.size();
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = -2.0 * M_PI * ell * static_cast<double>(i) / static_cast<double>(n);
        acc += x[i] * cplx(std::cos(phase), std::sin(phase));
    }
    return acc / static_cast<double>(n);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// random K-sparse scene with a minimum cyclic delay separation
inline tofpr::SparseSRF random_srf(std::mt19937_64& rng, int k, double period,
                                   double min_separation, double gamma_lo = 0.1,
                                   double gamma_hi = 10.0) {
    std::uniform_real_distribution<double> gamma(gamma_lo, gamma_hi);
    std::uniform_real_distribution<double> delay(0.0, period);
    tofpr::SparseSRF srf;
    while (static_cast<int>(srf.echoes.size()) < k) {
        const double t = delay(rng);
        bool ok = t < period;
        for (const auto& e : srf.echoes) {
            double d = std::abs(e.delay_s - t);
            d = std::min(d, period - d);
            if (d < min_separation) ok = false;
        }
        if (ok) srf.echoes.push_back({cplx(gamma(rng), 0.0), t});
    }
    std::sort(srf.echoes.begin(), srf.echoes.end(),
              [](const tofpr::Echo& a, const tofpr::Echo& b) { return a.delay_s < b.delay_s; });
    return srf;
}

} // namespace testutil

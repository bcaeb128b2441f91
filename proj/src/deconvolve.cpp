// SPDX-License-Identifier: Apache-2.0
#include "tofpr/deconvolve.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tofpr/errors.hpp"

namespace tofpr {

namespace {

int gcd_int(int a, int b) { return std::gcd(a, b); }

} // namespace

MeasurementSystem::MeasurementSystem(const PulseSpectrum& pulse, const AcquisitionConfig& config,
                                     SystemPath path, double weight_floor)
    : config_(config), path_(path) {
    config.validate();
    if (pulse.bandlimit() != config.bandlimit)
        throw std::invalid_argument("build_system: pulse bandlimit does not match config");
    if (weight_floor < 0.0)
        throw std::invalid_argument("build_system: weight_floor must be nonnegative");

    // Distinct DFT columns: frequency ell lands on bin (ell*q mod N), so the
    // grid is degenerate unless N/gcd(N,q) exceeds 2L.
    const int q = config.cycles();
    const int n = config.n_samples;
    if (n / gcd_int(n, q) <= 2 * config.bandlimit)
        throw std::invalid_argument("build_system: degenerate grid, DFT columns alias "
                                    "(N/gcd(N,q) <= 2L)");

    const std::vector<double> full_weights = (path == SystemPath::PhaseLess)
                                                 ? pulse.fourth_power_weights()
                                                 : pulse.power_weights();
    const int L = config.bandlimit;
    double wmax = 0.0;
    for (double w : full_weights) wmax = std::max(wmax, w);
    if (wmax <= 0.0)
        throw std::invalid_argument("build_system: pulse spectrum is identically zero");
    floor_abs_ = weight_floor * wmax;

    // Shrink to the widest symmetric band whose weights all clear the floor;
    // the downstream spectral estimators need contiguous uniform samples.
    // A zero floor disables shrinking and leaves the solve-time check to
    // refuse uninvertible weights.
    if (full_weights[static_cast<std::size_t>(L)] < floor_abs_)
        throw std::invalid_argument("build_system: pulse has no usable DC weight");
    int l_eff = 0;
    while (l_eff < L) {
        const double w = full_weights[static_cast<std::size_t>(L + l_eff + 1)];
        if (floor_abs_ > 0.0 && w < floor_abs_) break;
        ++l_eff;
    }
    effective_L_ = l_eff;

    weights_.assign(static_cast<std::size_t>(2 * l_eff + 1), 0.0);
    for (int ell = -l_eff; ell <= l_eff; ++ell)
        weights_[static_cast<std::size_t>(ell + l_eff)] = full_weights[static_cast<std::size_t>(ell + L)];

    const double w0d = config.omega0() * config.delta_s;
    u_.resize(n, 2 * l_eff + 1);
    for (int i = 0; i < n; ++i)
        for (int ell = -l_eff; ell <= l_eff; ++ell) {
            const double phase = w0d * ell * i;
            u_(i, ell + l_eff) = cplx(std::cos(phase), std::sin(phase));
        }

    qr_.compute(u_);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(u_);
    const auto& sv = svd.singularValues();
    condition_ = sv(0) / sv(sv.size() - 1);
}

Eigen::VectorXcd MeasurementSystem::solve(const Eigen::VectorXcd& rhs) const {
    return qr_.solve(rhs);
}

std::vector<double> MeasurementSystem::resynthesize(std::span<const cplx> spectrum_samples) const {
    if (spectrum_samples.size() != weights_.size())
        throw std::invalid_argument("resynthesize: expected " + std::to_string(weights_.size()) +
                                    " spectrum samples, got " + std::to_string(spectrum_samples.size()));
    Eigen::VectorXcd x(static_cast<Eigen::Index>(spectrum_samples.size()));
    for (std::size_t i = 0; i < spectrum_samples.size(); ++i) {
        const cplx v = (path_ == SystemPath::PhaseIntact) ? std::conj(spectrum_samples[i])
                                                          : spectrum_samples[i];
        x(static_cast<Eigen::Index>(i)) = weights_[i] * v;
    }
    const Eigen::VectorXcd out = u_ * x;
    std::vector<double> samples(static_cast<std::size_t>(out.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) samples[static_cast<std::size_t>(i)] = out(i).real();
    return samples;
}

std::vector<double> MeasurementSystem::resynthesize(std::span<const double> spectrum_samples) const {
    std::vector<cplx> c(spectrum_samples.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(spectrum_samples[i], 0.0);
    return resynthesize(std::span<const cplx>(c));
}

MeasurementSystem build_system(const PulseSpectrum& pulse, const AcquisitionConfig& config,
                               SystemPath path, double weight_floor) {
    return MeasurementSystem(pulse, config, path, weight_floor);
}

namespace {

Eigen::VectorXcd deconvolve_common(const MeasurementVector& v, const MeasurementSystem& system,
                                   MeasurementKind expected_kind, SystemPath expected_path) {
    if (v.kind != expected_kind)
        throw std::invalid_argument("deconvolve: measurement kind does not match the solver");
    if (system.path() != expected_path)
        throw std::invalid_argument("deconvolve: system was built for the other path");
    if (static_cast<int>(v.samples.size()) != system.config().n_samples)
        throw std::invalid_argument("deconvolve: sample count does not match the system");

    const int l_eff = system.effective_bandlimit();
    const auto& w = system.weights();
    for (int ell = -l_eff; ell <= l_eff; ++ell) {
        const double wi = w[static_cast<std::size_t>(ell + l_eff)];
        if (wi < system.weight_floor_abs() || wi <= 0.0)
            throw IllConditionedSystem("deconvolve: retained weight below floor at ell=" +
                                           std::to_string(ell),
                                       ell);
    }

    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(v.samples.size()));
    for (std::size_t i = 0; i < v.samples.size(); ++i)
        rhs(static_cast<Eigen::Index>(i)) = cplx(v.samples[i], 0.0);
    Eigen::VectorXcd x = system.solve(rhs);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) /= w[static_cast<std::size_t>(i)];
    return x;
}

} // namespace

std::vector<double> estimate_s_hat(const MeasurementVector& m, const MeasurementSystem& system) {
    const Eigen::VectorXcd x =
        deconvolve_common(m, system, MeasurementKind::PhaseLess, SystemPath::PhaseLess);
    // s_hat is real; a large imaginary residue means the data is not a
    // genuine autocorrelation and silently dropping it would hide that.
    double max_im = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) max_im = std::max(max_im, std::abs(x(i).imag()));
    const double norm = x.norm();
    if (max_im > 1e-6 * std::max(norm, 1e-300))
        throw DataInconsistency("estimate_s_hat: imaginary residue " + std::to_string(max_im) +
                                " exceeds 1e-6 of the solution norm; input is not phase-less data");
    std::vector<double> s(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) s[static_cast<std::size_t>(i)] = x(i).real();
    return s;
}

std::vector<cplx> estimate_h_hat(const MeasurementVector& y, const MeasurementSystem& system) {
    const Eigen::VectorXcd x =
        deconvolve_common(y, system, MeasurementKind::PhaseIntact, SystemPath::PhaseIntact);
    std::vector<cplx> h(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) h[static_cast<std::size_t>(i)] = std::conj(x(i));
    return h;
}

} // namespace tofpr

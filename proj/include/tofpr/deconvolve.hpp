// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tofpr/types.hpp"

namespace tofpr {

enum class SystemPath : std::uint8_t {
    PhaseLess,  // m = U D_psi s_hat
    PhaseIntact // y = U D_phi conj(h_hat)
};

/// The linear acquisition system for one (pulse, grid) pair.
///
/// U is the N x (2L_eff+1) sub-DFT matrix with entries exp(j*ell*omega0*n*delta);
/// the diagonal carries psi_hat (phase-less) or phi_hat (phase-intact) for the
/// retained frequencies. Frequencies whose weight falls below
/// weight_floor * max weight are dropped symmetrically, shrinking the
/// effective bandlimit; the retained band and the condition number of U are
/// reported. Immutable once built; solves against a shared instance are
/// thread-safe.
class MeasurementSystem {
public:
    MeasurementSystem(const PulseSpectrum& pulse, const AcquisitionConfig& config, SystemPath path,
                      double weight_floor);

    SystemPath path() const { return path_; }
    const AcquisitionConfig& config() const { return config_; }
    /// Largest |ell| retained after the weight floor.
    int effective_bandlimit() const { return effective_L_; }
    /// Diagonal weights for ell = -L_eff..L_eff.
    const std::vector<double>& weights() const { return weights_; }
    /// sigma_max/sigma_min of U; 1 when the grid makes the columns orthogonal.
    double condition_number() const { return condition_; }
    double weight_floor_abs() const { return floor_abs_; }
    const Eigen::MatrixXcd& dft_matrix() const { return u_; }

    /// Least-squares solve U x = rhs via the cached QR factorization.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

    /// Forward model on already-deconvolved spectrum samples: Re(U D x).
    /// For the phase-less path x holds s_hat samples; for the phase-intact
    /// path x holds h_hat samples (conjugated internally to match the model).
    std::vector<double> resynthesize(std::span<const cplx> spectrum_samples) const;
    std::vector<double> resynthesize(std::span<const double> spectrum_samples) const;

private:
    AcquisitionConfig config_;
    SystemPath path_;
    int effective_L_ = 0;
    double floor_abs_ = 0.0;
    std::vector<double> weights_;
    Eigen::MatrixXcd u_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
    double condition_ = 0.0;
};

/// Builds the measurement system for the requested path.
/// weight_floor is relative to the largest diagonal entry; out-of-floor
/// frequencies are dropped (default 1e-8, see estimate_s_hat).
/// Throws std::invalid_argument on degenerate grids (aliased DFT columns).
MeasurementSystem build_system(const PulseSpectrum& pulse, const AcquisitionConfig& config,
                               SystemPath path, double weight_floor = 1e-8);

/// Weighted deconvolution s_hat = D_psi^-1 U^+ m for the retained band
/// ell = -L_eff..L_eff. The solver output must be real up to a 1e-6
/// relative residue (DataInconsistency otherwise); retained weights below
/// the floor raise IllConditionedSystem naming the offending ell.
std::vector<double> estimate_s_hat(const MeasurementVector& m, const MeasurementSystem& system);

/// Oracle-path deconvolution: returns h_hat(ell*omega0) for the retained
/// band, undoing the conjugation in y = U D_phi conj(h_hat).
std::vector<cplx> estimate_h_hat(const MeasurementVector& y, const MeasurementSystem& system);

} // namespace tofpr

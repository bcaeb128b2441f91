// SPDX-License-Identifier: Apache-2.0
#include "tofpr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "tofpr/errors.hpp"

namespace tofpr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXcd hankel_of(const std::vector<cplx>& v, int rows, int cols) {
    Eigen::MatrixXcd h(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) h(r, c) = v[static_cast<std::size_t>(r + c)];
    return h;
}

std::vector<cplx> antidiagonal_average(const Eigen::MatrixXcd& h) {
    const int rows = static_cast<int>(h.rows());
    const int cols = static_cast<int>(h.cols());
    std::vector<cplx> v(static_cast<std::size_t>(rows + cols - 1), cplx(0.0, 0.0));
    std::vector<int> count(v.size(), 0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            v[static_cast<std::size_t>(r + c)] += h(r, c);
            ++count[static_cast<std::size_t>(r + c)];
        }
    for (std::size_t k = 0; k < v.size(); ++k) v[k] /= static_cast<double>(count[k]);
    return v;
}

} // namespace

void UniformSpectrumSamples::validate() const {
    if (bandlimit < 0 || values.size() != static_cast<std::size_t>(2 * bandlimit + 1))
        throw std::invalid_argument("UniformSpectrumSamples: need 2L+1 values");
    if (omega0 <= 0.0)
        throw std::invalid_argument("UniformSpectrumSamples: omega0 must be positive");
}

CadzowResult cadzow_denoise(const UniformSpectrumSamples& samples, int rank,
                            const CadzowOptions& options) {
    samples.validate();
    const int L = samples.bandlimit;
    const int dim = L + 1; // square Hankel from 2L+1 samples
    if (rank < 1 || rank >= dim)
        throw std::invalid_argument("cadzow_denoise: rank must satisfy 1 <= rank < " +
                                    std::to_string(dim) + ", got " + std::to_string(rank));

    CadzowResult result;
    result.samples = samples;
    std::vector<cplx> v = samples.values;

    for (int iter = 0; iter <= options.max_iters; ++iter) {
        Eigen::MatrixXcd h = hankel_of(v, dim, dim);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();

        double tail = 0.0;
        for (int i = rank; i < dim; ++i) tail += sv(i) * sv(i);
        result.rank_distance_history.push_back(std::sqrt(tail));
        result.singular_ratio = (sv(0) > 0.0) ? sv(rank) / sv(0) : 0.0;
        result.iterations = iter;

        if (result.singular_ratio <= options.tol || iter == options.max_iters) break;

        Eigen::VectorXcd trunc = sv.head(rank).cast<cplx>();
        Eigen::MatrixXcd low_rank =
            svd.matrixU().leftCols(rank) * trunc.asDiagonal() * svd.matrixV().leftCols(rank).adjoint();
        std::vector<cplx> next = antidiagonal_average(low_rank);

        // stalled fixed point under noise: stop once the iterate stops moving
        double change = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            change = std::max(change, std::abs(next[i] - v[i]));
            scale = std::max(scale, std::abs(v[i]));
        }
        v = std::move(next);
        if (change <= 1e-14 * std::max(scale, 1e-300)) {
            result.iterations = iter + 1;
            break;
        }
    }

    result.samples.values = std::move(v);
    return result;
}

namespace {

struct Root {
    cplx z;
    bool paired = false;
};

std::vector<cplx> polynomial_roots(const Eigen::VectorXcd& ascending_coeffs) {
    // companion-matrix eigenvalues of the monic polynomial
    const int deg = static_cast<int>(ascending_coeffs.size()) - 1;
    const cplx lead = ascending_coeffs(deg);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = cplx(1.0, 0.0);
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -ascending_coeffs(i) / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
    std::vector<cplx> roots(static_cast<std::size_t>(deg));
    for (int i = 0; i < deg; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

// Force the root multiset to be closed under conjugation, as real even data
// guarantees analytically: greedily match opposite-sign argument pairs and
// average them; leftover near-real roots collapse onto the DC axis.
void enforce_conjugate_pairs(std::vector<cplx>& roots, bool& low_confidence) {
    std::vector<Root> rs;
    rs.reserve(roots.size());
    for (const auto& z : roots) rs.push_back({z, false});

    std::vector<cplx> out;
    double min_paired_arg = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(rs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(std::arg(rs[a].z)) > std::abs(std::arg(rs[b].z));
    });

    for (std::size_t oi : order) {
        if (rs[oi].paired) continue;
        const double arg_i = std::arg(rs[oi].z);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = rs.size();
        for (std::size_t j = 0; j < rs.size(); ++j) {
            if (j == oi || rs[j].paired) continue;
            const double arg_j = std::arg(rs[j].z);
            if (arg_i * arg_j >= 0.0) continue;
            const double mismatch = std::abs(arg_i + arg_j);
            if (mismatch < best) {
                best = mismatch;
                best_j = j;
            }
        }
        const double tol = 0.25 * std::abs(arg_i) + 1e-7;
        if (best_j < rs.size() && best <= tol) {
            rs[oi].paired = rs[best_j].paired = true;
            const double theta = 0.5 * (std::abs(arg_i) + std::abs(std::arg(rs[best_j].z)));
            const double mag = std::sqrt(std::abs(rs[oi].z) * std::abs(rs[best_j].z));
            out.emplace_back(std::polar(mag, theta));
            out.emplace_back(std::polar(mag, -theta));
            min_paired_arg = std::min(min_paired_arg, theta);
        }
    }

    const double snap_tol = std::min(0.5 * min_paired_arg, kTwoPi * 1e-3);
    for (auto& r : rs) {
        if (r.paired) continue;
        if (std::abs(std::arg(r.z)) < std::max(snap_tol, kTwoPi * 1e-9)) {
            out.emplace_back(std::abs(r.z), 0.0); // DC candidate
        } else {
            low_confidence = true;
            out.push_back(r.z);
        }
    }
    roots = std::move(out);
}

} // namespace

ExponentialModel annihilating_filter(const UniformSpectrumSamples& samples, int model_order,
                                     SpectrumSymmetry symmetry) {
    samples.validate();
    const int L = samples.bandlimit;
    const int M = model_order;
    if (M < 1)
        throw std::invalid_argument("annihilating_filter: model order must be at least 1");
    if (2 * L + 1 < 2 * M + 1)
        throw ModelOrderMismatch("annihilating_filter: " + std::to_string(2 * L + 1) +
                                 " samples cannot determine " + std::to_string(M) +
                                 " exponentials (need 2M+1)");

    // Toeplitz convolution system: sum_j A_j v_{ell-j} = 0 for ell = -L+M..L.
    const int rows = 2 * L + 1 - M;
    Eigen::MatrixXcd t(rows, M + 1);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j <= M; ++j) t(r, j) = samples.values[static_cast<std::size_t>(M + r - j)];

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int null_dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= 1e-10 * std::max(smax, 1e-300)) ++null_dim;
    if (smax <= 0.0 || null_dim > 1)
        throw ModelOrderMismatch("annihilating_filter: null space dimension " +
                                 std::to_string(null_dim) + " != 1; the data supports fewer than " +
                                 std::to_string(M) + " exponentials");

    ExponentialModel model;
    model.omega0 = samples.omega0;
    // no singular value vanished: either noisy data or an understated order;
    // a weak annihilator is worth flagging
    if (null_dim == 0 && sv(sv.size() - 1) > 1e-3 * smax) model.low_confidence = true;

    const Eigen::VectorXcd filter = svd.matrixV().col(M);
    // P(z) = sum_j A_j z^{M-j}; ascending coefficients are reversed filter taps
    Eigen::VectorXcd poly(M + 1);
    for (int j = 0; j <= M; ++j) poly(j) = filter(M - j);
    double coeff_max = 0.0;
    for (int j = 0; j <= M; ++j) coeff_max = std::max(coeff_max, std::abs(poly(j)));
    if (std::abs(poly(M)) < 1e-12 * coeff_max)
        throw ModelOrderMismatch("annihilating_filter: effective filter order below " +
                                 std::to_string(M));

    std::vector<cplx> roots = polynomial_roots(poly);
    for (const auto& z : roots) {
        const double r = std::abs(z);
        if (r <= 0.0 || std::abs(std::log(r)) > 0.2) model.low_confidence = true;
    }
    if (symmetry == SpectrumSymmetry::ConjugatePairs)
        enforce_conjugate_pairs(roots, model.low_confidence);

    const double period = kTwoPi / samples.omega0;
    for (const auto& z : roots) {
        double f = -std::arg(z) / samples.omega0;
        if (f <= -0.5 * period) f += period; // delays live in (-T/2, T/2]
        model.components.push_back({cplx(0.0, 0.0), f});
    }
    std::sort(model.components.begin(), model.components.end(),
              [](const ExponentialComponent& a, const ExponentialComponent& b) {
                  return a.delay_s < b.delay_s;
              });
    return model;
}

ExponentialModel fit_amplitudes(const UniformSpectrumSamples& samples, const ExponentialModel& model) {
    samples.validate();
    if (model.components.empty())
        throw std::invalid_argument("fit_amplitudes: model has no components");
    const int L = samples.bandlimit;
    const int m = static_cast<int>(model.components.size());
    const double period = kTwoPi / samples.omega0;

    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double d = std::abs(model.components[static_cast<std::size_t>(i)].delay_s -
                                model.components[static_cast<std::size_t>(j)].delay_s);
            d = std::min(d, period - d);
            if (d < period * 1e-12)
                throw NearDegenerateModel("fit_amplitudes: delays " + std::to_string(i) + " and " +
                                          std::to_string(j) + " coincide");
        }

    Eigen::MatrixXcd v(2 * L + 1, m);
    for (int r = 0; r < 2 * L + 1; ++r) {
        const int ell = r - L;
        for (int i = 0; i < m; ++i) {
            const double phase = -samples.omega0 * ell * model.components[static_cast<std::size_t>(i)].delay_s;
            v(r, i) = cplx(std::cos(phase), std::sin(phase));
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e10)
        throw NearDegenerateModel("fit_amplitudes: Vandermonde condition number above 1e10; "
                                  "component delays are too close to resolve");

    Eigen::VectorXcd rhs(2 * L + 1);
    for (int r = 0; r < 2 * L + 1; ++r) rhs(r) = samples.values[static_cast<std::size_t>(r)];
    const Eigen::VectorXcd c = svd.solve(rhs);

    ExponentialModel fitted = model;
    for (int i = 0; i < m; ++i) fitted.components[static_cast<std::size_t>(i)].amplitude = c(i);
    fitted.fit_residual = (v * c - rhs).norm();
    return fitted;
}

} // namespace tofpr

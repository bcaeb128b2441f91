// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tofpr/deconvolve.hpp"
#include "tofpr/io.hpp"
#include "tofpr/scene.hpp"
#include "tofpr/spectral.hpp"
#include "tofpr/types.hpp"

namespace tofpr {

struct PathFlags {
    bool oracle = true;
    bool phaseless = true;
};

/// End-to-end run settings. Fixing the seed fixes every output byte,
/// independent of the worker count.
struct RunConfig {
    AcquisitionConfig acquisition;
    PulseSpectrum pulse;
    double noise_sigma = 0.0; // Gaussian sigma relative to per-pixel peak |y|
    std::uint64_t seed = 0;
    int echo_count = 2; // scene prior K
    PathFlags paths;
    int workers = 1;
    int trace_x = -1; // -1: scene centre
    int trace_y = -1;
    double weight_floor = 1e-8;
    CadzowOptions cadzow;

    void validate() const;
    /// Experiment-preset acquisition plus a matching Gaussian pulse.
    static RunConfig experiment_preset();
};

enum class PixelFlag : std::uint8_t {
    Ok = 0,
    CoincidentEchoes,
    EmptyPixel,
    ModelOrderMismatchFlag,
    NearDegenerateFlag,
    InconsistentSpectrumFlag,
    IllConditionedFlag,
    DataInconsistencyFlag,
    NumericalFailure,
};

const char* to_string(PixelFlag flag);

/// Time- and Fourier-domain curves captured for one designated pixel,
/// mirroring the per-pixel panels of the experiment figure.
struct PixelTrace {
    int x = -1;
    int y = -1;
    std::vector<double> y_samples, m_samples;   // measured (noisy) traces
    std::vector<double> y_fit, m_fit;           // resynthesized from the fits
    std::vector<double> s_measured, s_fitted;   // deconvolved / fitted s_hat
    std::vector<cplx> h_measured, h_fitted;     // oracle-path spectra
};

struct RunReport {
    int width = 0;
    int height = 0;
    AcquisitionConfig acquisition;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;
    int echo_count = 2;
    PathFlags paths;
    int effective_bandlimit = 0;

    Map truth_gamma0, truth_gamma1;
    Map oracle_gamma0, oracle_gamma1, oracle_t0, oracle_t1;
    Map phaseless_gamma0, phaseless_gamma1, phaseless_t01;
    std::vector<std::uint8_t> flags_oracle, flags_phaseless; // PixelFlag per pixel
    std::vector<std::uint8_t> clamped;                       // 0/1 per pixel

    int ok_pixels = 0;
    int flagged_pixels = 0;
    int clamped_pixels = 0;

    // Map PSNRs are restricted to pixels every enabled path reconstructed;
    // resynthesis PSNRs compare input measurements to their refits.
    double psnr_gamma0_oracle_vs_phaseless_db = 0.0;
    double psnr_gamma1_oracle_vs_phaseless_db = 0.0;
    double psnr_gamma0_truth_vs_oracle_db = 0.0;
    double psnr_gamma1_truth_vs_oracle_db = 0.0;
    double psnr_gamma0_truth_vs_phaseless_db = 0.0;
    double psnr_gamma1_truth_vs_phaseless_db = 0.0;
    double psnr_resynth_oracle_db = 0.0;
    double psnr_resynth_phaseless_db = 0.0;

    double elapsed_seconds = 0.0; // console diagnostics only, never serialized

    PixelTrace trace;

    PixelFlag oracle_flag(int x, int y) const {
        return static_cast<PixelFlag>(flags_oracle[static_cast<std::size_t>(y) * width + x]);
    }
    PixelFlag phaseless_flag(int x, int y) const {
        return static_cast<PixelFlag>(flags_phaseless[static_cast<std::size_t>(y) * width + x]);
    }
};

/// Peak signal-to-noise ratio 10*log10(peak^2/MSE) in dB, peak taken over
/// the reference map a. Identical maps return the 300 dB sentinel; values
/// are capped there. Throws std::invalid_argument on dimension mismatch.
double psnr(const Map& a, const Map& b);

/// Per-pixel synthesize -> corrupt -> deconvolve -> denoise -> estimate ->
/// resolve, over a shared measurement system, with per-pixel failures
/// recorded as flags rather than aborting the batch.
RunReport run_pipeline(const Scene& scene, const RunConfig& config);

/// Forward model only: per-pixel noisy lock-in samples y and their cyclic
/// autocorrelations m, packaged for the `simulate` subcommand.
MeasurementArchive simulate_measurements(const Scene& scene, const RunConfig& config);

/// Reconstruction from stored measurements. Truth maps (and the PSNRs
/// against them) are filled when the generating scene is supplied.
RunReport reconstruct_from_archive(const MeasurementArchive& archive, const RunConfig& config,
                                   const Scene* truth_scene = nullptr);

/// Writes maps (PGM), trace and spectrum CSVs, SVG plots, a flags CSV and the
/// machine-readable report.txt into outdir (created if missing).
void emit_outputs(const RunReport& report, const std::string& outdir);

/// Serialized form of everything emit_outputs puts in report.txt.
std::string serialize_report(const RunReport& report);

/// Parsed-back scalar fields of a report file, for round-trip checks and the
/// `report` CLI subcommand. PSNR raw fields reproduce the doubles exactly.
struct ReportSummary {
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;
    int echo_count = 0;
    int effective_bandlimit = 0;
    int ok_pixels = 0;
    int flagged_pixels = 0;
    int clamped_pixels = 0;
    std::vector<std::pair<std::string, double>> psnr_db; // raw full-precision values
};

ReportSummary load_report(const std::string& path);

} // namespace tofpr

// SPDX-License-Identifier: Apache-2.0
#include "tofpr/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tofpr/errors.hpp"
#include "tofpr/phase_retrieval.hpp"
#include "tofpr/signal_core.hpp"

namespace tofpr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t pixel_seed(std::uint64_t run_seed, std::size_t pixel_index) {
    return splitmix64(run_seed + 0x9E3779B97F4A7C15ULL * (pixel_index + 1));
}

} // namespace

void RunConfig::validate() const {
    acquisition.validate();
    if (pulse.bandlimit() != acquisition.bandlimit)
        throw ConfigError("run config: pulse bandlimit does not match acquisition bandlimit");
    if (noise_sigma < 0.0) throw ConfigError("run config: noise_sigma must be nonnegative");
    if (echo_count < 1) throw ConfigError("run config: echo_count must be at least 1");
    if (paths.phaseless && echo_count != 2)
        throw ConfigError("run config: the phase-less magnitude path is closed-form for "
                          "exactly two echoes (echo_count = 2)");
    if (!paths.phaseless && !paths.oracle)
        throw ConfigError("run config: at least one path must be enabled");
    if (workers < 1) throw ConfigError("run config: workers must be at least 1");
    if (weight_floor < 0.0) throw ConfigError("run config: weight_floor must be nonnegative");
}

RunConfig RunConfig::experiment_preset() {
    RunConfig cfg;
    cfg.acquisition = AcquisitionConfig::experiment_preset();
    // keeps the weakest retained weight near 3e-4 of the peak, so the
    // fourth-power deconvolution stays comfortably conditioned
    const double sigma = cfg.acquisition.period_s / (std::numbers::pi * cfg.acquisition.bandlimit);
    cfg.pulse = gaussian_pulse_spectrum(cfg.acquisition.bandlimit, cfg.acquisition.period_s, sigma);
    return cfg;
}

const char* to_string(PixelFlag flag) {
    switch (flag) {
        case PixelFlag::Ok: return "ok";
        case PixelFlag::CoincidentEchoes: return "coincident-echoes";
        case PixelFlag::EmptyPixel: return "empty-pixel";
        case PixelFlag::ModelOrderMismatchFlag: return "model-order-mismatch";
        case PixelFlag::NearDegenerateFlag: return "near-degenerate-model";
        case PixelFlag::InconsistentSpectrumFlag: return "inconsistent-spectrum";
        case PixelFlag::IllConditionedFlag: return "ill-conditioned-system";
        case PixelFlag::DataInconsistencyFlag: return "data-inconsistency";
        case PixelFlag::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

namespace {

PixelFlag classify_current_exception() {
    try {
        throw;
    } catch (const ModelOrderMismatch&) {
        return PixelFlag::ModelOrderMismatchFlag;
    } catch (const NearDegenerateModel&) {
        return PixelFlag::NearDegenerateFlag;
    } catch (const InconsistentSpectrum&) {
        return PixelFlag::InconsistentSpectrumFlag;
    } catch (const IllConditionedSystem&) {
        return PixelFlag::IllConditionedFlag;
    } catch (const DataInconsistency&) {
        return PixelFlag::DataInconsistencyFlag;
    } catch (const std::exception&) {
        return PixelFlag::NumericalFailure;
    }
}

constexpr double kPsnrCapDb = 300.0;

double psnr_from_peak_mse(double peak, double mse) {
    if (mse <= 0.0) return kPsnrCapDb;
    if (peak <= 0.0) return -kPsnrCapDb;
    const double db = 10.0 * std::log10(peak * peak / mse);
    return std::clamp(db, -kPsnrCapDb, kPsnrCapDb);
}

double psnr_masked(const Map& a, const Map& b, const std::vector<std::uint8_t>& include) {
    double peak = 0.0, sse = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!include[i]) continue;
        peak = std::max(peak, a.values[i]);
        const double d = a.values[i] - b.values[i];
        sse += d * d;
        ++count;
    }
    if (count == 0) return 0.0;
    return psnr_from_peak_mse(peak, sse / static_cast<double>(count));
}

struct PixelOutcome {
    PixelFlag flag_oracle = PixelFlag::Ok;
    PixelFlag flag_phaseless = PixelFlag::Ok;
    double og0 = 0.0, og1 = 0.0, ot0 = 0.0, ot1 = 0.0;
    double pg0 = 0.0, pg1 = 0.0, pt01 = 0.0;
    bool clamped = false;
    double sse_o = 0.0, sse_p = 0.0;
    double peak_o = 0.0, peak_p = 0.0;
    std::int64_t count_o = 0, count_p = 0;
};

std::vector<cplx> evaluate_model(const ExponentialModel& model, int bandlimit, double omega0) {
    std::vector<cplx> values(static_cast<std::size_t>(2 * bandlimit + 1));
    for (int ell = -bandlimit; ell <= bandlimit; ++ell) {
        cplx acc(0.0, 0.0);
        for (const auto& comp : model.components) {
            const double phase = -omega0 * ell * comp.delay_s;
            acc += comp.amplitude * cplx(std::cos(phase), std::sin(phase));
        }
        values[static_cast<std::size_t>(ell + bandlimit)] = acc;
    }
    return values;
}

struct SynthResult {
    std::vector<double> y; // noisy lock-in samples; empty for an empty pixel
    PixelFlag preflag = PixelFlag::Ok;
};

SynthResult synthesize_pixel(const Scene& scene, const RunConfig& config, std::size_t idx) {
    const double g0 = scene.gamma0.values[idx];
    const double g1 = scene.gamma1.values[idx];
    const double t0 = scene.t0.values[idx];
    const double t1 = scene.t1.values[idx];

    SynthResult result;
    SparseSRF srf;
    if (g0 <= 0.0 && g1 <= 0.0) {
        result.preflag = PixelFlag::EmptyPixel;
        return result;
    }
    if (g0 > 0.0 && g1 > 0.0 && t0 == t1) {
        // collapse to a single echo at synthesis time; the K=2 prior cannot
        // hold, so the pixel is flagged rather than silently mis-fit
        srf.echoes.push_back({cplx(g0 + g1, 0.0), t0});
        result.preflag = PixelFlag::CoincidentEchoes;
    } else {
        if (g0 > 0.0) srf.echoes.push_back({cplx(g0, 0.0), t0});
        if (g1 > 0.0) srf.echoes.push_back({cplx(g1, 0.0), t1});
    }

    MeasurementVector y = synthesize_phaseintact(srf, config.pulse, config.acquisition);
    if (config.noise_sigma > 0.0) {
        double peak = 0.0;
        for (double v : y.samples) peak = std::max(peak, std::abs(v));
        std::mt19937_64 rng(pixel_seed(config.seed, idx));
        std::normal_distribution<double> gauss(0.0, config.noise_sigma * peak);
        for (auto& v : y.samples) v += gauss(rng);
    }
    result.y = std::move(y.samples);
    return result;
}

struct SharedState {
    const RunConfig* config = nullptr;
    const MeasurementSystem* sys_s = nullptr;
    const MeasurementSystem* sys_h = nullptr;
    std::size_t trace_index = SIZE_MAX;
    PixelTrace* trace = nullptr;
};

void reconstruct_pixel(const SharedState& shared, std::size_t idx, std::span<const double> y,
                       std::span<const double> m, PixelFlag preflag, PixelOutcome& out) {
    const RunConfig& config = *shared.config;
    const AcquisitionConfig& acq = config.acquisition;
    const bool is_trace = (idx == shared.trace_index);
    const int k = config.echo_count;

    if (is_trace && shared.trace) {
        shared.trace->y_samples.assign(y.begin(), y.end());
        shared.trace->m_samples.assign(m.begin(), m.end());
    }

    bool all_zero = true;
    for (double v : y)
        if (v != 0.0) {
            all_zero = false;
            break;
        }
    if (preflag == PixelFlag::Ok && all_zero) preflag = PixelFlag::EmptyPixel;
    if (preflag != PixelFlag::Ok) {
        out.flag_oracle = out.flag_phaseless = preflag;
        return;
    }

    if (config.paths.oracle) {
        try {
            const MeasurementSystem& sys = *shared.sys_h;
            if (sys.effective_bandlimit() < k)
                throw ModelOrderMismatch("oracle path: effective bandlimit " +
                                         std::to_string(sys.effective_bandlimit()) +
                                         " below echo count " + std::to_string(k));
            MeasurementVector yv;
            yv.samples.assign(y.begin(), y.end());
            yv.config = acq;
            yv.kind = MeasurementKind::PhaseIntact;
            const std::vector<cplx> h = estimate_h_hat(yv, sys);
            const SparseSRF fitted = oracle_extract(h, acq, k);

            out.og0 = std::abs(fitted.echoes[0].amplitude);
            out.ot0 = fitted.echoes[0].delay_s;
            if (fitted.echoes.size() > 1) {
                out.og1 = std::abs(fitted.echoes[1].amplitude);
                out.ot1 = fitted.echoes[1].delay_s;
            }

            const int l_eff = sys.effective_bandlimit();
            std::vector<cplx> h_fit(static_cast<std::size_t>(2 * l_eff + 1));
            for (int ell = -l_eff; ell <= l_eff; ++ell)
                h_fit[static_cast<std::size_t>(ell + l_eff)] =
                    h_hat_of_omega(fitted, ell * acq.omega0());
            const std::vector<double> y_fit = sys.resynthesize(std::span<const cplx>(h_fit));
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double d = y_fit[i] - y[i];
                out.sse_o += d * d;
                out.peak_o = std::max(out.peak_o, std::abs(y[i]));
            }
            out.count_o = static_cast<std::int64_t>(y.size());

            if (is_trace && shared.trace) {
                shared.trace->h_measured = h;
                shared.trace->h_fitted = h_fit;
                shared.trace->y_fit = y_fit;
            }
        } catch (...) {
            out.flag_oracle = classify_current_exception();
        }
    }

    if (config.paths.phaseless) {
        try {
            const MeasurementSystem& sys = *shared.sys_s;
            const int required = k * k - k + 1; // measurement bound L >= K^2-K+1
            if (sys.effective_bandlimit() < required)
                throw ModelOrderMismatch("phase-less path: effective bandlimit " +
                                         std::to_string(sys.effective_bandlimit()) +
                                         " below the measurement bound " + std::to_string(required));

            // the discrete lag sum carries a factor N relative to the
            // continuous model m = U D s_hat; undo it so recovered
            // magnitudes come out in scene units
            MeasurementVector mv;
            mv.samples.resize(m.size());
            const double scale = 1.0 / static_cast<double>(acq.n_samples);
            for (std::size_t i = 0; i < m.size(); ++i) mv.samples[i] = m[i] * scale;
            mv.config = acq;
            mv.kind = MeasurementKind::PhaseLess;

            const std::vector<double> s = estimate_s_hat(mv, sys);
            const int l_eff = sys.effective_bandlimit();
            UniformSpectrumSamples samples;
            samples.omega0 = acq.omega0();
            samples.bandlimit = l_eff;
            samples.values.resize(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) samples.values[i] = cplx(s[i], 0.0);

            const CadzowResult denoised = cadzow_denoise(samples, required, config.cadzow);
            ExponentialModel model =
                annihilating_filter(denoised.samples, required, SpectrumSymmetry::ConjugatePairs);
            model = fit_amplitudes(denoised.samples, model);
            const AutocorrParams params = identify_parameters(model);
            const EchoMagnitudes mags = resolve_magnitudes_k2(params);

            out.pg0 = mags.magnitudes[0];
            out.pg1 = mags.magnitudes[1];
            out.pt01 = params.cross_terms.front().t_km;
            out.clamped = mags.clamped;

            const std::vector<cplx> s_fit = evaluate_model(model, l_eff, acq.omega0());
            std::vector<double> s_fit_re(s_fit.size());
            for (std::size_t i = 0; i < s_fit.size(); ++i) s_fit_re[i] = s_fit[i].real();
            const std::vector<double> m_fit = sys.resynthesize(std::span<const double>(s_fit_re));
            for (std::size_t i = 0; i < mv.samples.size(); ++i) {
                const double d = m_fit[i] - mv.samples[i];
                out.sse_p += d * d;
                out.peak_p = std::max(out.peak_p, std::abs(mv.samples[i]));
            }
            out.count_p = static_cast<std::int64_t>(mv.samples.size());

            if (is_trace && shared.trace) {
                shared.trace->m_samples = mv.samples; // normalized, what the solver saw
                shared.trace->s_measured = s;
                shared.trace->s_fitted = s_fit_re;
                shared.trace->m_fit = m_fit;
            }
        } catch (...) {
            out.flag_phaseless = classify_current_exception();
        }
    }
}

void run_parallel(std::size_t jobs, int workers, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> cursor{0};
    auto loop = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= jobs) break;
            fn(i);
        }
    };
    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs)));
    if (n_workers <= 1) {
        loop();
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(loop);
    for (auto& t : threads) t.join();
}

RunReport make_report_shell(int width, int height, const RunConfig& config) {
    RunReport report;
    report.width = width;
    report.height = height;
    report.acquisition = config.acquisition;
    report.seed = config.seed;
    report.noise_sigma = config.noise_sigma;
    report.echo_count = config.echo_count;
    report.paths = config.paths;
    const std::size_t n_pixels = static_cast<std::size_t>(width) * height;
    report.truth_gamma0 = Map(width, height);
    report.truth_gamma1 = Map(width, height);
    report.oracle_gamma0 = Map(width, height);
    report.oracle_gamma1 = Map(width, height);
    report.oracle_t0 = Map(width, height);
    report.oracle_t1 = Map(width, height);
    report.phaseless_gamma0 = Map(width, height);
    report.phaseless_gamma1 = Map(width, height);
    report.phaseless_t01 = Map(width, height);
    report.flags_oracle.assign(n_pixels, 0);
    report.flags_phaseless.assign(n_pixels, 0);
    report.clamped.assign(n_pixels, 0);
    return report;
}

void assemble_report(RunReport& report, const std::vector<PixelOutcome>& outcomes,
                     const RunConfig& config, bool have_truth) {
    const std::size_t n_pixels = outcomes.size();
    std::vector<std::uint8_t> include(n_pixels, 0);
    double sse_o = 0.0, sse_p = 0.0, peak_o = 0.0, peak_p = 0.0;
    std::int64_t count_o = 0, count_p = 0;
    for (std::size_t i = 0; i < n_pixels; ++i) {
        const PixelOutcome& px = outcomes[i];
        report.flags_oracle[i] = static_cast<std::uint8_t>(px.flag_oracle);
        report.flags_phaseless[i] = static_cast<std::uint8_t>(px.flag_phaseless);
        report.clamped[i] = px.clamped ? 1 : 0;
        report.oracle_gamma0.values[i] = px.og0;
        report.oracle_gamma1.values[i] = px.og1;
        report.oracle_t0.values[i] = px.ot0;
        report.oracle_t1.values[i] = px.ot1;
        report.phaseless_gamma0.values[i] = px.pg0;
        report.phaseless_gamma1.values[i] = px.pg1;
        report.phaseless_t01.values[i] = px.pt01;

        const bool ok_o = !config.paths.oracle || px.flag_oracle == PixelFlag::Ok;
        const bool ok_p = !config.paths.phaseless || px.flag_phaseless == PixelFlag::Ok;
        if (ok_o && ok_p) {
            include[i] = 1;
            ++report.ok_pixels;
        } else {
            ++report.flagged_pixels;
        }
        if (px.clamped) ++report.clamped_pixels;
        sse_o += px.sse_o;
        sse_p += px.sse_p;
        peak_o = std::max(peak_o, px.peak_o);
        peak_p = std::max(peak_p, px.peak_p);
        count_o += px.count_o;
        count_p += px.count_p;
    }

    if (config.paths.oracle && config.paths.phaseless) {
        report.psnr_gamma0_oracle_vs_phaseless_db =
            psnr_masked(report.oracle_gamma0, report.phaseless_gamma0, include);
        report.psnr_gamma1_oracle_vs_phaseless_db =
            psnr_masked(report.oracle_gamma1, report.phaseless_gamma1, include);
    }
    if (config.paths.oracle) {
        if (have_truth) {
            report.psnr_gamma0_truth_vs_oracle_db =
                psnr_masked(report.truth_gamma0, report.oracle_gamma0, include);
            report.psnr_gamma1_truth_vs_oracle_db =
                psnr_masked(report.truth_gamma1, report.oracle_gamma1, include);
        }
        report.psnr_resynth_oracle_db =
            (count_o > 0) ? psnr_from_peak_mse(peak_o, sse_o / static_cast<double>(count_o)) : 0.0;
    }
    if (config.paths.phaseless) {
        if (have_truth) {
            // the phase-less path sorts magnitudes; compare against the truth
            // maps sorted the same way so attribution cannot flip the metric
            Map truth_hi = report.truth_gamma0, truth_lo = report.truth_gamma1;
            for (std::size_t i = 0; i < n_pixels; ++i)
                if (truth_hi.values[i] < truth_lo.values[i])
                    std::swap(truth_hi.values[i], truth_lo.values[i]);
            report.psnr_gamma0_truth_vs_phaseless_db =
                psnr_masked(truth_hi, report.phaseless_gamma0, include);
            report.psnr_gamma1_truth_vs_phaseless_db =
                psnr_masked(truth_lo, report.phaseless_gamma1, include);
        }
        report.psnr_resynth_phaseless_db =
            (count_p > 0) ? psnr_from_peak_mse(peak_p, sse_p / static_cast<double>(count_p)) : 0.0;
    }
}

struct Systems {
    std::optional<MeasurementSystem> s, h;
};

Systems build_systems(const RunConfig& config) {
    Systems sys;
    if (config.paths.phaseless)
        sys.s.emplace(config.pulse, config.acquisition, SystemPath::PhaseLess, config.weight_floor);
    if (config.paths.oracle)
        sys.h.emplace(config.pulse, config.acquisition, SystemPath::PhaseIntact, config.weight_floor);
    return sys;
}

std::size_t resolve_trace_index(const RunConfig& config, int width, int height, RunReport& report) {
    const int tx = (config.trace_x >= 0) ? config.trace_x : width / 2;
    const int ty = (config.trace_y >= 0) ? config.trace_y : height / 2;
    if (tx >= width || ty >= height)
        throw ConfigError("run config: trace pixel outside the scene");
    report.trace.x = tx;
    report.trace.y = ty;
    return static_cast<std::size_t>(ty) * width + tx;
}

} // namespace

double psnr(const Map& a, const Map& b) {
    if (a.width != b.width || a.height != b.height || a.values.size() != b.values.size())
        throw std::invalid_argument("psnr: map dimensions do not match");
    if (a.values.empty()) throw std::invalid_argument("psnr: empty maps");
    double peak = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        peak = std::max(peak, a.values[i]);
        const double d = a.values[i] - b.values[i];
        sse += d * d;
    }
    return psnr_from_peak_mse(peak, sse / static_cast<double>(a.values.size()));
}

RunReport run_pipeline(const Scene& scene, const RunConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    config.validate();
    scene.validate(config.acquisition.period_s);

    RunReport report = make_report_shell(scene.width, scene.height, config);
    report.truth_gamma0 = scene.gamma0;
    report.truth_gamma1 = scene.gamma1;

    const Systems sys = build_systems(config);
    report.effective_bandlimit =
        sys.s ? sys.s->effective_bandlimit() : sys.h->effective_bandlimit();

    SharedState shared;
    shared.config = &config;
    shared.sys_s = sys.s ? &*sys.s : nullptr;
    shared.sys_h = sys.h ? &*sys.h : nullptr;
    shared.trace_index = resolve_trace_index(config, scene.width, scene.height, report);
    shared.trace = &report.trace;

    const std::size_t n_pixels = scene.pixel_count();
    std::vector<PixelOutcome> outcomes(n_pixels);
    run_parallel(n_pixels, config.workers, [&](std::size_t i) {
        const SynthResult synth = synthesize_pixel(scene, config, i);
        if (synth.y.empty()) {
            reconstruct_pixel(shared, i, {}, {}, synth.preflag, outcomes[i]);
            return;
        }
        const std::vector<double> m = cyclic_autocorrelation(synth.y);
        reconstruct_pixel(shared, i, synth.y, m, synth.preflag, outcomes[i]);
    });

    assemble_report(report, outcomes, config, /*have_truth=*/true);
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

MeasurementArchive simulate_measurements(const Scene& scene, const RunConfig& config) {
    config.validate();
    scene.validate(config.acquisition.period_s);

    MeasurementArchive archive;
    archive.width = scene.width;
    archive.height = scene.height;
    archive.n_samples = config.acquisition.n_samples;
    archive.delta_s = config.acquisition.delta_s;
    archive.period_s = config.acquisition.period_s;
    archive.bandlimit = config.acquisition.bandlimit;
    archive.noise_sigma = config.noise_sigma;
    archive.seed = config.seed;

    const std::size_t n_pixels = scene.pixel_count();
    const std::size_t n = static_cast<std::size_t>(config.acquisition.n_samples);
    archive.y.assign(n_pixels * n, 0.0);
    archive.m.assign(n_pixels * n, 0.0);

    run_parallel(n_pixels, config.workers, [&](std::size_t i) {
        const SynthResult synth = synthesize_pixel(scene, config, i);
        if (synth.y.empty()) return; // empty pixel rows stay zero
        const std::vector<double> m = cyclic_autocorrelation(synth.y);
        std::copy(synth.y.begin(), synth.y.end(), archive.y.begin() + static_cast<std::ptrdiff_t>(i * n));
        std::copy(m.begin(), m.end(), archive.m.begin() + static_cast<std::ptrdiff_t>(i * n));
    });
    return archive;
}

RunReport reconstruct_from_archive(const MeasurementArchive& archive, const RunConfig& config,
                                   const Scene* truth_scene) {
    const auto t_start = std::chrono::steady_clock::now();
    config.validate();
    if (archive.n_samples != config.acquisition.n_samples ||
        std::abs(archive.delta_s - config.acquisition.delta_s) > 1e-15 ||
        std::abs(archive.period_s - config.acquisition.period_s) > 1e-15 ||
        archive.bandlimit != config.acquisition.bandlimit)
        throw ConfigError("reconstruct: measurement archive acquisition parameters do not match "
                          "the run config");
    if (truth_scene && (truth_scene->width != archive.width || truth_scene->height != archive.height))
        throw ConfigError("reconstruct: truth scene dimensions do not match the archive");

    RunReport report = make_report_shell(archive.width, archive.height, config);
    if (truth_scene) {
        report.truth_gamma0 = truth_scene->gamma0;
        report.truth_gamma1 = truth_scene->gamma1;
    }

    const Systems sys = build_systems(config);
    report.effective_bandlimit =
        sys.s ? sys.s->effective_bandlimit() : sys.h->effective_bandlimit();

    SharedState shared;
    shared.config = &config;
    shared.sys_s = sys.s ? &*sys.s : nullptr;
    shared.sys_h = sys.h ? &*sys.h : nullptr;
    shared.trace_index = resolve_trace_index(config, archive.width, archive.height, report);
    shared.trace = &report.trace;

    const std::size_t n_pixels = static_cast<std::size_t>(archive.width) * archive.height;
    const std::size_t n = static_cast<std::size_t>(archive.n_samples);
    std::vector<PixelOutcome> outcomes(n_pixels);
    run_parallel(n_pixels, config.workers, [&](std::size_t i) {
        const std::span<const double> y(archive.y.data() + i * n, n);
        const std::span<const double> m(archive.m.data() + i * n, n);
        reconstruct_pixel(shared, i, y, m, PixelFlag::Ok, outcomes[i]);
    });

    assemble_report(report, outcomes, config, truth_scene != nullptr);
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

std::string serialize_report(const RunReport& report) {
    KeyValueDocument doc;
    doc.set("run", "width", std::to_string(report.width));
    doc.set("run", "height", std::to_string(report.height));
    doc.set("run", "seed", std::to_string(report.seed));
    doc.set("run", "noise_sigma", format_exact(report.noise_sigma));
    doc.set("run", "echo_count", std::to_string(report.echo_count));
    std::string paths;
    if (report.paths.oracle) paths += "oracle";
    if (report.paths.phaseless) paths += paths.empty() ? "phaseless" : ",phaseless";
    doc.set("run", "paths", paths);
    doc.set("run", "trace_x", std::to_string(report.trace.x));
    doc.set("run", "trace_y", std::to_string(report.trace.y));

    doc.set("acquisition", "n", std::to_string(report.acquisition.n_samples));
    doc.set("acquisition", "delta_ps", format_exact(report.acquisition.delta_s * 1e12));
    doc.set("acquisition", "period_ps", format_exact(report.acquisition.period_s * 1e12));
    doc.set("acquisition", "bandlimit", std::to_string(report.acquisition.bandlimit));
    doc.set("acquisition", "effective_bandlimit", std::to_string(report.effective_bandlimit));

    doc.set("results", "ok_pixels", std::to_string(report.ok_pixels));
    doc.set("results", "flagged_pixels", std::to_string(report.flagged_pixels));
    doc.set("results", "clamped_pixels", std::to_string(report.clamped_pixels));

    auto put_psnr = [&doc](const char* key, double db) {
        doc.set("psnr", std::string(key) + "_db", strfmt("%.2f", db));
        doc.set("psnr", std::string(key) + "_db_raw", format_exact(db));
    };
    if (report.paths.oracle && report.paths.phaseless) {
        put_psnr("map_gamma0_oracle_vs_phaseless", report.psnr_gamma0_oracle_vs_phaseless_db);
        put_psnr("map_gamma1_oracle_vs_phaseless", report.psnr_gamma1_oracle_vs_phaseless_db);
    }
    if (report.paths.oracle) {
        put_psnr("map_gamma0_truth_vs_oracle", report.psnr_gamma0_truth_vs_oracle_db);
        put_psnr("map_gamma1_truth_vs_oracle", report.psnr_gamma1_truth_vs_oracle_db);
        put_psnr("resynthesis_oracle", report.psnr_resynth_oracle_db);
    }
    if (report.paths.phaseless) {
        put_psnr("map_gamma0_truth_vs_phaseless", report.psnr_gamma0_truth_vs_phaseless_db);
        put_psnr("map_gamma1_truth_vs_phaseless", report.psnr_gamma1_truth_vs_phaseless_db);
        put_psnr("resynthesis_phaseless", report.psnr_resynth_phaseless_db);
    }
    return doc.serialize();
}

ReportSummary load_report(const std::string& path) {
    const KeyValueDocument doc = load_key_value_file(path);
    ReportSummary summary;
    summary.width = static_cast<int>(doc.get_int("run", "width"));
    summary.height = static_cast<int>(doc.get_int("run", "height"));
    summary.seed = static_cast<std::uint64_t>(doc.get_int("run", "seed"));
    summary.noise_sigma = doc.get_double("run", "noise_sigma");
    summary.echo_count = static_cast<int>(doc.get_int("run", "echo_count"));
    summary.effective_bandlimit = static_cast<int>(doc.get_int("acquisition", "effective_bandlimit"));
    summary.ok_pixels = static_cast<int>(doc.get_int("results", "ok_pixels"));
    summary.flagged_pixels = static_cast<int>(doc.get_int("results", "flagged_pixels"));
    summary.clamped_pixels = static_cast<int>(doc.get_int("results", "clamped_pixels"));
    for (const auto& e : doc.entries) {
        if (e.section != "psnr") continue;
        const std::string suffix = "_db_raw";
        if (e.key.size() > suffix.size() &&
            e.key.compare(e.key.size() - suffix.size(), suffix.size(), suffix) == 0) {
            summary.psnr_db.emplace_back(e.key.substr(0, e.key.size() - suffix.size()),
                                         doc.get_double("psnr", e.key));
        }
    }
    return summary;
}

namespace {

std::vector<double> padded(const std::vector<double>& v, std::size_t n) {
    std::vector<double> out = v;
    out.resize(n, 0.0);
    return out;
}

} // namespace

void emit_outputs(const RunReport& report, const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("emit_outputs: cannot create " + outdir + ": " + ec.message());
    const auto path = [&](const std::string& name) { return outdir + "/" + name; };

    write_text_file(path("report.txt"), serialize_report(report));

    save_map_pgm(report.truth_gamma0, path("truth_gamma0.pgm"));
    save_map_pgm(report.truth_gamma1, path("truth_gamma1.pgm"));
    if (report.paths.oracle) {
        save_map_pgm(report.oracle_gamma0, path("oracle_gamma0.pgm"));
        save_map_pgm(report.oracle_gamma1, path("oracle_gamma1.pgm"));
    }
    if (report.paths.phaseless) {
        save_map_pgm(report.phaseless_gamma0, path("phaseless_gamma0.pgm"));
        save_map_pgm(report.phaseless_gamma1, path("phaseless_gamma1.pgm"));
    }

    {
        std::ofstream flags(path("flags.csv"), std::ios::binary);
        if (!flags) throw IoError("emit_outputs: cannot open " + path("flags.csv"));
        flags << "x,y,path,code,label\n";
        for (int y = 0; y < report.height; ++y)
            for (int x = 0; x < report.width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * report.width + x;
                if (report.paths.oracle && report.flags_oracle[i] != 0)
                    flags << x << "," << y << ",oracle," << int(report.flags_oracle[i]) << ","
                          << to_string(static_cast<PixelFlag>(report.flags_oracle[i])) << "\n";
                if (report.paths.phaseless && report.flags_phaseless[i] != 0)
                    flags << x << "," << y << ",phaseless," << int(report.flags_phaseless[i]) << ","
                          << to_string(static_cast<PixelFlag>(report.flags_phaseless[i])) << "\n";
            }
    }

    const std::size_t n = static_cast<std::size_t>(report.acquisition.n_samples);
    const PixelTrace& tr = report.trace;
    std::vector<double> index(n);
    for (std::size_t i = 0; i < n; ++i) index[i] = static_cast<double>(i);
    save_csv(path("trace_time.csv"), {"n", "y", "m", "y_fit", "m_fit"},
             {index, padded(tr.y_samples, n), padded(tr.m_samples, n), padded(tr.y_fit, n),
              padded(tr.m_fit, n)});

    const std::size_t bins =
        std::max({tr.s_measured.size(), tr.h_measured.size(), std::size_t(1)});
    const int l_eff = static_cast<int>(bins / 2);
    std::vector<double> ells(bins), h_meas_re(bins, 0.0), h_meas_im(bins, 0.0), h_fit_re(bins, 0.0),
        h_fit_im(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) ells[i] = static_cast<double>(static_cast<int>(i) - l_eff);
    for (std::size_t i = 0; i < tr.h_measured.size() && i < bins; ++i) {
        h_meas_re[i] = tr.h_measured[i].real();
        h_meas_im[i] = tr.h_measured[i].imag();
    }
    for (std::size_t i = 0; i < tr.h_fitted.size() && i < bins; ++i) {
        h_fit_re[i] = tr.h_fitted[i].real();
        h_fit_im[i] = tr.h_fitted[i].imag();
    }
    save_csv(path("trace_spectrum.csv"),
             {"ell", "s_measured", "s_fitted", "h_measured_re", "h_measured_im", "h_fitted_re",
              "h_fitted_im"},
             {ells, padded(tr.s_measured, bins), padded(tr.s_fitted, bins), h_meas_re, h_meas_im,
              h_fit_re, h_fit_im});

    const std::string trace_tag =
        "pixel (" + std::to_string(tr.x) + ", " + std::to_string(tr.y) + ")";
    if (report.paths.oracle) {
        save_svg_plot(path("trace_phaseintact.svg"), "phase-intact samples y, " + trace_tag,
                      {{"measured", "#1f6fb2", index, padded(tr.y_samples, n)},
                       {"refit", "#d1402f", index, padded(tr.y_fit, n)}});
        std::vector<double> habs_m(bins, 0.0), habs_f(bins, 0.0);
        for (std::size_t i = 0; i < tr.h_measured.size() && i < bins; ++i)
            habs_m[i] = std::abs(tr.h_measured[i]);
        for (std::size_t i = 0; i < tr.h_fitted.size() && i < bins; ++i)
            habs_f[i] = std::abs(tr.h_fitted[i]);
        save_svg_plot(path("spectrum_phaseintact.svg"), "|h_hat(ell*omega0)|, " + trace_tag,
                      {{"measured", "#1f6fb2", ells, habs_m}, {"fitted", "#d1402f", ells, habs_f}});
    }
    if (report.paths.phaseless) {
        save_svg_plot(path("trace_phaseless.svg"), "phase-less samples m, " + trace_tag,
                      {{"measured", "#1f6fb2", index, padded(tr.m_samples, n)},
                       {"refit", "#d1402f", index, padded(tr.m_fit, n)}});
        save_svg_plot(path("spectrum_phaseless.svg"), "s_hat(ell*omega0), " + trace_tag,
                      {{"measured", "#1f6fb2", ells, padded(tr.s_measured, bins)},
                       {"fitted", "#d1402f", ells, padded(tr.s_fitted, bins)}});
    }
}

} // namespace tofpr

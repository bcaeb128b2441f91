// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: simulate time-of-flight echo measurements, reconstruct
// per-pixel echo magnitudes from them (phase-less and oracle paths), and emit
// maps, traces, plots and a machine-readable report.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "tofpr/config.hpp"
#include "tofpr/errors.hpp"
#include "tofpr/io.hpp"
#include "tofpr/pipeline.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string outdir = "out";
    long long seed = -1;
    double noise_sigma = -1.0;
    int workers = 0;
    int trace_x = -2, trace_y = -2;
    long long max_flagged = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out = true) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    if (with_out) cmd->add_option("-o,--out", opts.outdir, "output directory");
    cmd->add_option("--seed", opts.seed, "override [run] seed");
    cmd->add_option("--noise-sigma", opts.noise_sigma, "override [run] noise_sigma");
    cmd->add_option("-j,--workers", opts.workers, "override [run] workers");
    cmd->add_option("--trace-x", opts.trace_x, "trace pixel x (default: centre)");
    cmd->add_option("--trace-y", opts.trace_y, "trace pixel y (default: centre)");
    cmd->add_option("--max-flagged", opts.max_flagged,
                    "exit nonzero when more pixels than this are flagged");
}

tofpr::RunSpec load_spec_with_overrides(const CommonOptions& opts) {
    tofpr::RunSpec spec = tofpr::load_run_spec(opts.config_path);
    if (opts.seed >= 0) spec.config.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.noise_sigma >= 0.0) spec.config.noise_sigma = opts.noise_sigma;
    if (opts.workers > 0) spec.config.workers = opts.workers;
    if (opts.trace_x >= -1) spec.config.trace_x = opts.trace_x;
    if (opts.trace_y >= -1) spec.config.trace_y = opts.trace_y;
    spec.config.validate();
    return spec;
}

void print_summary(const tofpr::RunReport& report) {
    std::printf("scene %dx%d, K=%d, noise sigma %g, seed %llu\n", report.width, report.height,
                report.echo_count, report.noise_sigma,
                static_cast<unsigned long long>(report.seed));
    std::printf("pixels ok/flagged/clamped: %d / %d / %d\n", report.ok_pixels,
                report.flagged_pixels, report.clamped_pixels);
    if (report.paths.oracle && report.paths.phaseless) {
        std::printf("map PSNR oracle vs phase-less: gamma0 %.2f dB, gamma1 %.2f dB\n",
                    report.psnr_gamma0_oracle_vs_phaseless_db,
                    report.psnr_gamma1_oracle_vs_phaseless_db);
    }
    if (report.paths.oracle)
        std::printf("resynthesis PSNR (oracle): %.2f dB\n", report.psnr_resynth_oracle_db);
    if (report.paths.phaseless)
        std::printf("resynthesis PSNR (phase-less): %.2f dB\n", report.psnr_resynth_phaseless_db);
    std::printf("elapsed: %.2f s\n", report.elapsed_seconds);
}

int finish(const tofpr::RunReport& report, const CommonOptions& opts) {
    tofpr::emit_outputs(report, opts.outdir);
    print_summary(report);
    std::printf("outputs written to %s\n", opts.outdir.c_str());
    if (report.flagged_pixels > opts.max_flagged) {
        std::fprintf(stderr, "error: %d flagged pixels exceed the --max-flagged threshold %lld\n",
                     report.flagged_pixels, opts.max_flagged);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse light-echo simulation and phase-less reconstruction"};
    app.require_subcommand(1);

    CommonOptions run_opts, sim_opts, rec_opts;
    std::string measurements_path, report_path, default_config_path;

    CLI::App* cmd_run = app.add_subcommand("run", "synthesize a scene and reconstruct it end to end");
    add_common(cmd_run, run_opts);
    cmd_run->add_option("--write-default-config", default_config_path,
                        "write a template config file and exit")
        ->excludes(cmd_run->get_option("--config"));
    cmd_run->get_option("--config")->required(false);

    CLI::App* cmd_sim = app.add_subcommand("simulate", "synthesize measurements and store them");
    add_common(cmd_sim, sim_opts);

    CLI::App* cmd_rec =
        app.add_subcommand("reconstruct", "reconstruct from stored measurements");
    add_common(cmd_rec, rec_opts);
    cmd_rec->add_option("--measurements", measurements_path, "measurement archive from `simulate`")
        ->required();

    CLI::App* cmd_report = app.add_subcommand("report", "print a stored report");
    cmd_report->add_option("--in", report_path, "report.txt emitted by run/reconstruct")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            if (!default_config_path.empty()) {
                tofpr::write_text_file(default_config_path, tofpr::default_config_text());
                std::printf("wrote %s\n", default_config_path.c_str());
                return 0;
            }
            if (run_opts.config_path.empty())
                throw tofpr::ConfigError("run: --config is required (or --write-default-config)");
            const tofpr::RunSpec spec = load_spec_with_overrides(run_opts);
            const tofpr::RunReport report = tofpr::run_pipeline(spec.scene, spec.config);
            return finish(report, run_opts);
        }
        if (cmd_sim->parsed()) {
            const tofpr::RunSpec spec = load_spec_with_overrides(sim_opts);
            const tofpr::MeasurementArchive archive =
                tofpr::simulate_measurements(spec.scene, spec.config);
            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(sim_opts.outdir, ec);
            if (ec)
                throw tofpr::IoError("cannot create " + sim_opts.outdir + ": " + ec.message());
            const std::string archive_path = sim_opts.outdir + "/measurements.bin";
            tofpr::save_measurement_archive(archive, archive_path);
            tofpr::save_map_pgm(spec.scene.gamma0, sim_opts.outdir + "/truth_gamma0.pgm");
            tofpr::save_map_pgm(spec.scene.gamma1, sim_opts.outdir + "/truth_gamma1.pgm");
            std::printf("wrote %s (%dx%d pixels, N=%d)\n", archive_path.c_str(), archive.width,
                        archive.height, archive.n_samples);
            return 0;
        }
        if (cmd_rec->parsed()) {
            const tofpr::RunSpec spec = load_spec_with_overrides(rec_opts);
            const tofpr::MeasurementArchive archive =
                tofpr::load_measurement_archive(measurements_path);
            const tofpr::Scene* truth =
                (spec.scene.width == archive.width && spec.scene.height == archive.height)
                    ? &spec.scene
                    : nullptr;
            const tofpr::RunReport report =
                tofpr::reconstruct_from_archive(archive, spec.config, truth);
            return finish(report, rec_opts);
        }
        if (cmd_report->parsed()) {
            const tofpr::ReportSummary summary = tofpr::load_report(report_path);
            std::printf("report %s\n", report_path.c_str());
            std::printf("scene %dx%d, K=%d, seed %llu, noise sigma %g\n", summary.width,
                        summary.height, summary.echo_count,
                        static_cast<unsigned long long>(summary.seed), summary.noise_sigma);
            std::printf("effective bandlimit: %d\n", summary.effective_bandlimit);
            std::printf("pixels ok/flagged/clamped: %d / %d / %d\n", summary.ok_pixels,
                        summary.flagged_pixels, summary.clamped_pixels);
            for (const auto& [name, db] : summary.psnr_db)
                std::printf("%-36s %.2f dB\n", name.c_str(), db);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

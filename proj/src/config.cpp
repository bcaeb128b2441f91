// SPDX-License-Identifier: Apache-2.0
#include "tofpr/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tofpr/errors.hpp"
#include "tofpr/signal_core.hpp"

namespace tofpr {

namespace {

PathFlags parse_paths(const std::string& value) {
    PathFlags flags{false, false};
    std::istringstream in(value);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token == "oracle")
            flags.oracle = true;
        else if (token == "phaseless")
            flags.phaseless = true;
        else if (!token.empty())
            throw ConfigError("unknown path '" + token + "' (expected oracle, phaseless)");
    }
    return flags;
}

double scene_delay(const KeyValueDocument& doc, const std::string& key_base, double period_s) {
    if (doc.has("scene", key_base + "_frac"))
        return doc.get_double("scene", key_base + "_frac") * period_s;
    if (doc.has("scene", key_base + "_ps"))
        return doc.get_double("scene", key_base + "_ps") * 1e-12;
    throw ConfigError("scene: need " + key_base + "_frac or " + key_base + "_ps");
}

} // namespace

RunSpec parse_run_spec(const KeyValueDocument& doc) {
    RunSpec spec;
    RunConfig& cfg = spec.config;

    const RunConfig preset = RunConfig::experiment_preset();
    cfg.acquisition.n_samples =
        static_cast<int>(doc.has("acquisition", "n") ? doc.get_int("acquisition", "n")
                                                     : preset.acquisition.n_samples);
    cfg.acquisition.delta_s = doc.has("acquisition", "delta_ps")
                                  ? doc.get_double("acquisition", "delta_ps") * 1e-12
                                  : preset.acquisition.delta_s;
    cfg.acquisition.bandlimit =
        static_cast<int>(doc.has("acquisition", "bandlimit") ? doc.get_int("acquisition", "bandlimit")
                                                             : preset.acquisition.bandlimit);
    cfg.acquisition.period_s = doc.has("acquisition", "period_ps")
                                   ? doc.get_double("acquisition", "period_ps") * 1e-12
                                   : cfg.acquisition.n_samples * cfg.acquisition.delta_s;
    cfg.acquisition.validate();

    const std::string pulse_kind = doc.get_or("pulse", "kind", "gaussian");
    if (pulse_kind != "gaussian")
        throw ConfigError("pulse: unknown kind '" + pulse_kind + "' (only gaussian is built in)");
    const double default_sigma =
        cfg.acquisition.period_s / (std::numbers::pi * cfg.acquisition.bandlimit);
    const double sigma = doc.has("pulse", "sigma_ps") ? doc.get_double("pulse", "sigma_ps") * 1e-12
                                                      : default_sigma;
    cfg.pulse = gaussian_pulse_spectrum(cfg.acquisition.bandlimit, cfg.acquisition.period_s, sigma);

    cfg.noise_sigma = doc.has("run", "noise_sigma") ? doc.get_double("run", "noise_sigma") : 0.0;
    cfg.seed = doc.has("run", "seed") ? static_cast<std::uint64_t>(doc.get_int("run", "seed")) : 0;
    cfg.echo_count = static_cast<int>(doc.has("run", "echo_count") ? doc.get_int("run", "echo_count") : 2);
    cfg.workers = static_cast<int>(doc.has("run", "workers") ? doc.get_int("run", "workers") : 1);
    cfg.paths = parse_paths(doc.get_or("run", "paths", "oracle,phaseless"));
    cfg.trace_x = static_cast<int>(doc.has("run", "trace_x") ? doc.get_int("run", "trace_x") : -1);
    cfg.trace_y = static_cast<int>(doc.has("run", "trace_y") ? doc.get_int("run", "trace_y") : -1);
    cfg.weight_floor =
        doc.has("run", "weight_floor") ? doc.get_double("run", "weight_floor") : 1e-8;
    cfg.cadzow.max_iters = static_cast<int>(
        doc.has("run", "cadzow_max_iters") ? doc.get_int("run", "cadzow_max_iters") : 50);
    cfg.cadzow.tol =
        doc.has("run", "cadzow_tol") ? doc.get_double("run", "cadzow_tol") : 1e-10;

    const std::string kind = doc.get_or("scene", "kind", "placard");
    const double T = cfg.acquisition.period_s;
    if (kind == "flat") {
        const int w = static_cast<int>(doc.get_int("scene", "width"));
        const int h = static_cast<int>(doc.get_int("scene", "height"));
        spec.scene = generate_flat_scene(w, h, doc.get_double("scene", "gamma0"),
                                         doc.get_double("scene", "gamma1"),
                                         scene_delay(doc, "t0", T), scene_delay(doc, "t1", T));
    } else if (kind == "placard") {
        PlacardSpec placard;
        if (doc.has("scene", "width")) placard.width = static_cast<int>(doc.get_int("scene", "width"));
        if (doc.has("scene", "height"))
            placard.height = static_cast<int>(doc.get_int("scene", "height"));
        if (doc.has("scene", "sheet_gamma"))
            placard.sheet_gamma = doc.get_double("scene", "sheet_gamma");
        if (doc.has("scene", "board_gamma"))
            placard.board_gamma = doc.get_double("scene", "board_gamma");
        if (doc.has("scene", "text_gamma"))
            placard.text_gamma = doc.get_double("scene", "text_gamma");
        if (doc.has("scene", "sheet_depth_frac"))
            placard.sheet_depth_frac = doc.get_double("scene", "sheet_depth_frac");
        if (doc.has("scene", "board_depth_frac"))
            placard.board_depth_frac = doc.get_double("scene", "board_depth_frac");
        if (doc.has("scene", "sheet_tilt_frac"))
            placard.sheet_tilt_frac = doc.get_double("scene", "sheet_tilt_frac");
        if (doc.has("scene", "text")) placard.text = *doc.get("scene", "text");
        spec.scene = generate_placard_scene(placard, T);
    } else if (kind == "files") {
        spec.scene = load_scene_from_maps(
            doc.get_or("scene", "gamma0_map", ""), doc.get_or("scene", "gamma1_map", ""),
            doc.get_or("scene", "t0_map", ""), doc.get_or("scene", "t1_map", ""));
    } else {
        throw ConfigError("scene: unknown kind '" + kind + "' (expected flat, placard, files)");
    }

    spec.config.validate();
    spec.scene.validate(T);
    return spec;
}

RunSpec load_run_spec(const std::string& path) {
    try {
        return parse_run_spec(load_key_value_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string default_config_text() {
    return "# end-to-end run configuration\n"
           "[acquisition]\n"
           "n = 2795\n"
           "delta_ps = 70\n"
           "bandlimit = 20\n"
           "# period_ps defaults to n * delta\n"
           "\n"
           "[pulse]\n"
           "kind = gaussian\n"
           "# sigma_ps defaults to T / (pi * bandlimit)\n"
           "\n"
           "[scene]\n"
           "kind = placard\n"
           "width = 128\n"
           "height = 128\n"
           "sheet_gamma = 1.0\n"
           "board_gamma = 0.25\n"
           "text_gamma = 0.9\n"
           "sheet_depth_frac = 0.25\n"
           "board_depth_frac = 0.6\n"
           "text = TIME-OF|FLIGHT\n"
           "\n"
           "[run]\n"
           "noise_sigma = 0.01\n"
           "seed = 42\n"
           "echo_count = 2\n"
           "workers = 4\n"
           "paths = oracle,phaseless\n";
}

} // namespace tofpr

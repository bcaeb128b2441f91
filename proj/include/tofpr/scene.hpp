// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace tofpr {

/// Dense 2D map of per-pixel real values, row-major.
struct Map {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Map() = default;
    Map(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

/// Two-layer scene: per-pixel echo magnitudes and delays for the front
/// (gamma0, t0) and back (gamma1, t1) layers. Delays satisfy t0 < t1
/// pixelwise; a zero magnitude switches the pixel to a single echo.
struct Scene {
    int width = 0;
    int height = 0;
    Map gamma0, gamma1; // echo magnitudes, nonnegative
    Map t0, t1;         // echo delays, seconds

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    /// Throws ConfigError on dimension mismatches, negative magnitudes,
    /// delays outside [0, period) or t0 >= t1 where both layers are present.
    void validate(double period_s) const;
};

/// Constant maps everywhere; the smallest useful benchmark scene.
Scene generate_flat_scene(int width, int height, double gamma0, double gamma1, double t0_s,
                          double t1_s);

/// Placard behind a semi-transparent sheet. The sheet is a smooth dominant
/// front layer with a slight depth tilt; the back layer is a board carrying
/// bitmap-font lettering. board_gamma = 0 restricts the back layer support
/// to the lettering mask alone.
struct PlacardSpec {
    int width = 128;
    int height = 128;
    double sheet_gamma = 1.0;
    double board_gamma = 0.25;
    double text_gamma = 0.9;
    double sheet_depth_frac = 0.25; // t0 = frac * T
    double board_depth_frac = 0.60; // t1 = frac * T
    double sheet_tilt_frac = 0.01;  // depth spread across the sheet, fraction of T
    std::string text = "TIME-OF|FLIGHT"; // '|' separates lines
};

Scene generate_placard_scene(const PlacardSpec& spec, double period_s);

/// Lettering support of the placard generator (true where text ink lands).
std::vector<bool> placard_text_mask(const PlacardSpec& spec);

/// Scene from four map files (16-bit PGM with a scale comment; see io.hpp).
Scene load_scene_from_maps(const std::string& gamma0_path, const std::string& gamma1_path,
                           const std::string& t0_path, const std::string& t1_path);

} // namespace tofpr

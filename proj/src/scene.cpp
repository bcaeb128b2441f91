// SPDX-License-Identifier: Apache-2.0
#include "tofpr/scene.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <string>

#include "tofpr/errors.hpp"
#include "tofpr/io.hpp"

namespace tofpr {

void Scene::validate(double period_s) const {
    if (width <= 0 || height <= 0)
        throw ConfigError("scene: dimensions must be positive");
    const std::size_t n = pixel_count();
    for (const Map* m : {&gamma0, &gamma1, &t0, &t1}) {
        if (m->width != width || m->height != height || m->values.size() != n)
            throw ConfigError("scene: map dimensions do not match the scene");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (gamma0.values[i] < 0.0 || gamma1.values[i] < 0.0)
            throw ConfigError("scene: magnitudes must be nonnegative");
        if (t0.values[i] < 0.0 || t0.values[i] >= period_s || t1.values[i] < 0.0 ||
            t1.values[i] >= period_s)
            throw ConfigError("scene: delays must lie in [0, T)");
        if (gamma0.values[i] > 0.0 && gamma1.values[i] > 0.0 && t0.values[i] >= t1.values[i])
            throw ConfigError("scene: t0 must precede t1 pixelwise");
    }
}

Scene generate_flat_scene(int width, int height, double gamma0, double gamma1, double t0_s,
                          double t1_s) {
    if (width <= 0 || height <= 0)
        throw ConfigError("flat scene: dimensions must be positive");
    Scene s;
    s.width = width;
    s.height = height;
    s.gamma0 = Map(width, height, gamma0);
    s.gamma1 = Map(width, height, gamma1);
    s.t0 = Map(width, height, t0_s);
    s.t1 = Map(width, height, t1_s);
    return s;
}

namespace {

// 5x7 bitmap glyphs for the placard lettering
const std::map<char, std::array<const char*, 7>>& glyph_table() {
    static const std::map<char, std::array<const char*, 7>> glyphs = {
        {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
        {'I', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "#####"}},
        {'M', {"#   #", "## ##", "# # #", "#   #", "#   #", "#   #", "#   #"}},
        {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
        {'O', {" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
        {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
        {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
        {'G', {" ####", "#    ", "#    ", "# ###", "#   #", "#   #", " ### "}},
        {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
        {'-', {"     ", "     ", "     ", " ### ", "     ", "     ", "     "}},
        {' ', {"     ", "     ", "     ", "     ", "     ", "     ", "     "}},
    };
    return glyphs;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '|') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    lines.push_back(cur);
    return lines;
}

} // namespace

std::vector<bool> placard_text_mask(const PlacardSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0)
        throw ConfigError("placard: dimensions must be positive");
    const auto lines = split_lines(spec.text);
    std::size_t max_chars = 1;
    for (const auto& l : lines) max_chars = std::max(max_chars, l.size());
    const auto& glyphs = glyph_table();
    for (const auto& l : lines)
        for (char c : l)
            if (!glyphs.count(c))
                throw ConfigError(std::string("placard: no glyph for character '") + c + "'");

    const int cell_w = static_cast<int>(max_chars) * 6 - 1;
    const int cell_h = static_cast<int>(lines.size()) * 9 - 2;
    const int scale =
        std::max(1, std::min((spec.width * 9) / (cell_w * 10), (spec.height * 9) / (cell_h * 10)));
    const int block_w = cell_w * scale;
    const int block_h = cell_h * scale;
    const int ox = (spec.width - block_w) / 2;
    const int oy = (spec.height - block_h) / 2;

    std::vector<bool> mask(static_cast<std::size_t>(spec.width) * spec.height, false);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        const int line_ox = ox + (block_w - static_cast<int>(line.size() * 6 - 1) * scale) / 2;
        for (std::size_t ci = 0; ci < line.size(); ++ci) {
            const auto& glyph = glyphs.at(line[ci]);
            for (int gy = 0; gy < 7; ++gy)
                for (int gx = 0; gx < 5; ++gx) {
                    if (glyph[static_cast<std::size_t>(gy)][gx] != '#') continue;
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx) {
                            const int px = line_ox + (static_cast<int>(ci) * 6 + gx) * scale + sx;
                            const int py = oy + (static_cast<int>(li) * 9 + gy) * scale + sy;
                            if (px >= 0 && px < spec.width && py >= 0 && py < spec.height)
                                mask[static_cast<std::size_t>(py) * spec.width + px] = true;
                        }
                }
        }
    }
    return mask;
}

Scene generate_placard_scene(const PlacardSpec& spec, double period_s) {
    if (period_s <= 0.0)
        throw ConfigError("placard: period must be positive");
    if (spec.sheet_gamma <= 0.0 || spec.board_gamma < 0.0 || spec.text_gamma <= 0.0)
        throw ConfigError("placard: magnitudes must be positive (board may be zero)");
    if (spec.sheet_depth_frac <= 0.0 || spec.board_depth_frac >= 1.0 ||
        spec.sheet_depth_frac + spec.sheet_tilt_frac >= spec.board_depth_frac)
        throw ConfigError("placard: depth planes must satisfy 0 < sheet (+tilt) < board < T");

    const auto mask = placard_text_mask(spec);
    Scene s;
    s.width = spec.width;
    s.height = spec.height;
    s.gamma0 = Map(spec.width, spec.height);
    s.gamma1 = Map(spec.width, spec.height);
    s.t0 = Map(spec.width, spec.height);
    s.t1 = Map(spec.width, spec.height);

    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
            // gentle illumination falloff keeps the sheet layer smooth but not flat
            const double u = (spec.width > 1) ? static_cast<double>(x) / (spec.width - 1) : 0.0;
            const double v = (spec.height > 1) ? static_cast<double>(y) / (spec.height - 1) : 0.0;
            const double falloff = 1.0 - 0.15 * ((u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5));
            s.gamma0.values[i] = spec.sheet_gamma * falloff;
            s.gamma1.values[i] = mask[i] ? spec.text_gamma : spec.board_gamma;
            s.t0.values[i] = period_s * (spec.sheet_depth_frac + spec.sheet_tilt_frac * 0.5 * (u + v));
            s.t1.values[i] = period_s * spec.board_depth_frac;
        }
    return s;
}

Scene load_scene_from_maps(const std::string& gamma0_path, const std::string& gamma1_path,
                           const std::string& t0_path, const std::string& t1_path) {
    Scene s;
    s.gamma0 = load_map_pgm(gamma0_path);
    s.gamma1 = load_map_pgm(gamma1_path);
    s.t0 = load_map_pgm(t0_path);
    s.t1 = load_map_pgm(t1_path);
    s.width = s.gamma0.width;
    s.height = s.gamma0.height;
    return s;
}

} // namespace tofpr

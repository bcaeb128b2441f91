// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tofpr/scene.hpp"

namespace tofpr {

/// printf-style helper returning std::string (no std::format on this toolchain).
std::string strfmt(const char* fmt, ...);

/// Full-precision decimal rendering of a double (%.17g): parses back to the
/// identical bit pattern.
std::string format_exact(double v);

// --- maps ------------------------------------------------------------------

/// 16-bit binary PGM with a "# scale <value>" comment; pixel value = raw *
/// scale. Writing always spans the full 16-bit range, so save(load(f))
/// reproduces f byte-exactly for files written by this function.
void save_map_pgm(const Map& map, const std::string& path);
Map load_map_pgm(const std::string& path);

// --- CSV -------------------------------------------------------------------

/// RFC-4180-style CSV: header row then one row per record, "\n" line ends,
/// full-precision numbers.
void save_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns);

// --- SVG line plots ---------------------------------------------------------

struct SvgSeries {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal deterministic line plot: axes box, tick labels, one polyline per
/// series, legend in the top-right corner.
void save_svg_plot(const std::string& path, const std::string& title,
                   const std::vector<SvgSeries>& series);

// --- sectioned key-value text ------------------------------------------------

/// Ordered [section] key = value document; the config and report formats.
struct KeyValueDocument {
    struct Entry {
        std::string section;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;

    void set(const std::string& section, const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    bool has(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key) const;

    std::string serialize() const;
    static KeyValueDocument parse(const std::string& text);
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
KeyValueDocument load_key_value_file(const std::string& path);

// --- raw measurement blocks --------------------------------------------------

/// Per-pixel measurement store written by `simulate` and consumed by
/// `reconstruct`: a text header (sectioned key-value) followed by
/// little-endian float64 blocks, y rows then m rows.
struct MeasurementArchive {
    int width = 0;
    int height = 0;
    int n_samples = 0;
    double delta_s = 0.0;
    double period_s = 0.0;
    int bandlimit = 0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> y; // width*height rows of n_samples
    std::vector<double> m;
};

void save_measurement_archive(const MeasurementArchive& archive, const std::string& path);
MeasurementArchive load_measurement_archive(const std::string& path);

} // namespace tofpr

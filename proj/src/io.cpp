// SPDX-License-Identifier: Apache-2.0
#include "tofpr/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tofpr/errors.hpp"

namespace tofpr {

std::string strfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    const int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(static_cast<std::size_t>(n), '\0');
    std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

std::string format_exact(double v) { return strfmt("%.17g", v); }

// --- maps ------------------------------------------------------------------

void save_map_pgm(const Map& map, const std::string& path) {
    if (map.width <= 0 || map.height <= 0 || map.values.size() != map.size())
        throw IoError("save_map_pgm: malformed map for " + path);
    double peak = 0.0;
    for (double v : map.values) {
        if (v < 0.0 || !std::isfinite(v))
            throw IoError("save_map_pgm: values must be finite and nonnegative for " + path);
        peak = std::max(peak, v);
    }
    const double scale = (peak > 0.0) ? peak / 65535.0 : 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_map_pgm: cannot open " + path);
    out << "P5\n# scale " << format_exact(scale) << "\n"
        << map.width << " " << map.height << "\n65535\n";
    for (double v : map.values) {
        const auto raw = static_cast<std::uint16_t>(std::llround(v / scale));
        const unsigned char bytes[2] = {static_cast<unsigned char>(raw >> 8),
                                        static_cast<unsigned char>(raw & 0xff)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
    }
    if (!out) throw IoError("save_map_pgm: write failed for " + path);
}

Map load_map_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_map_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw IoError("load_map_pgm: " + path + " is not a binary PGM");

    double scale = 1.0;
    auto skip_ws_and_comments = [&]() {
        while (true) {
            const int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                double s = 0.0;
                if (std::sscanf(line.c_str(), "# scale %lf", &s) == 1 ||
                    std::sscanf(line.c_str(), "#scale %lf", &s) == 1)
                    scale = s;
            } else if (c != EOF && std::isspace(static_cast<unsigned char>(c))) {
                in.get();
            } else {
                break;
            }
        }
    };

    skip_ws_and_comments();
    int width = 0, height = 0, maxval = 0;
    in >> width;
    skip_ws_and_comments();
    in >> height;
    skip_ws_and_comments();
    in >> maxval;
    in.get(); // single whitespace before raster
    if (width <= 0 || height <= 0 || maxval != 65535)
        throw IoError("load_map_pgm: unsupported header in " + path + " (need 16-bit PGM)");

    Map map(width, height);
    for (auto& v : map.values) {
        unsigned char bytes[2];
        in.read(reinterpret_cast<char*>(bytes), 2);
        if (!in) throw IoError("load_map_pgm: truncated raster in " + path);
        const std::uint16_t raw = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
        v = raw * scale;
    }
    return map;
}

// --- CSV -------------------------------------------------------------------

void save_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns) {
    if (columns.size() != header.size())
        throw IoError("save_csv: header/column count mismatch for " + path);
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw IoError("save_csv: ragged columns for " + path);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << format_exact(columns[c][r]) << (c + 1 < columns.size() ? "," : "");
        out << "\n";
    }
    if (!out) throw IoError("save_csv: write failed for " + path);
}

// --- SVG -------------------------------------------------------------------

void save_svg_plot(const std::string& path, const std::string& title,
                   const std::vector<SvgSeries>& series) {
    constexpr int W = 860, H = 420;
    constexpr int ML = 70, MR = 20, MT = 40, MB = 45;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << strfmt("<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">%s</text>\n",
                  ML, title.c_str());
    out << strfmt("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"#444\"/>\n",
                  ML, MT, W - ML - MR, H - MT - MB);
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        out << strfmt("<text x=\"%.1f\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"middle\">%.4g</text>\n",
                      px(xv), H - MB + 16, xv);
        out << strfmt("<text x=\"%d\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"end\">%.4g</text>\n",
                      ML - 6, py(yv) + 4, yv);
    }
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << strfmt("%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        out << "\"/>\n";
    }
    int legend_y = MT + 16;
    for (const auto& s : series) {
        out << strfmt("<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"%s\" "
                      "stroke-width=\"2\"/>\n",
                      W - MR - 150, legend_y - 4, W - MR - 126, legend_y - 4, s.color.c_str());
        out << strfmt("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\">%s"
                      "</text>\n",
                      W - MR - 120, legend_y, s.label.c_str());
        legend_y += 18;
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

// --- sectioned key-value text -------------------------------------------------

void KeyValueDocument::set(const std::string& section, const std::string& key,
                           const std::string& value) {
    for (auto& e : entries)
        if (e.section == section && e.key == key) {
            e.value = value;
            return;
        }
    entries.push_back({section, key, value});
}

std::optional<std::string> KeyValueDocument::get(const std::string& section,
                                                 const std::string& key) const {
    for (const auto& e : entries)
        if (e.section == section && e.key == key) return e.value;
    return std::nullopt;
}

std::string KeyValueDocument::get_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
}

bool KeyValueDocument::has(const std::string& section, const std::string& key) const {
    return get(section, key).has_value();
}

double KeyValueDocument::get_double(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v) throw ConfigError("missing key [" + section + "] " + key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key [" + section + "] " + key + " is not a number: " + *v);
    }
}

long long KeyValueDocument::get_int(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v) throw ConfigError("missing key [" + section + "] " + key);
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing junk");
        return i;
    } catch (const std::exception&) {
        throw ConfigError("key [" + section + "] " + key + " is not an integer: " + *v);
    }
}

std::string KeyValueDocument::serialize() const {
    std::ostringstream out;
    std::string current;
    bool any = false;
    for (const auto& e : entries) {
        if (e.section != current || !any) {
            if (any) out << "\n";
            out << "[" << e.section << "]\n";
            current = e.section;
            any = true;
        }
        out << e.key << " = " << e.value << "\n";
    }
    return out.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
}

} // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text) {
    KeyValueDocument doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        doc.entries.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1))});
    }
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

KeyValueDocument load_key_value_file(const std::string& path) {
    try {
        return KeyValueDocument::parse(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// --- measurement archive --------------------------------------------------------

namespace {

void append_f64(std::ofstream& out, std::span<const double> data) {
    for (double v : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

void read_f64(std::ifstream& in, std::vector<double>& data, const std::string& path) {
    for (auto& v : data) {
        unsigned char bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw IoError("truncated measurement block in " + path);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        double v2;
        std::memcpy(&v2, &bits, 8);
        v = v2;
    }
}

} // namespace

void save_measurement_archive(const MeasurementArchive& archive, const std::string& path) {
    const std::size_t px = static_cast<std::size_t>(archive.width) * archive.height;
    const std::size_t expected = px * static_cast<std::size_t>(archive.n_samples);
    if (archive.y.size() != expected || archive.m.size() != expected)
        throw IoError("save_measurement_archive: block sizes do not match header for " + path);

    KeyValueDocument header;
    header.set("measurements", "width", std::to_string(archive.width));
    header.set("measurements", "height", std::to_string(archive.height));
    header.set("measurements", "n", std::to_string(archive.n_samples));
    header.set("measurements", "delta_ps", format_exact(archive.delta_s * 1e12));
    header.set("measurements", "period_ps", format_exact(archive.period_s * 1e12));
    header.set("measurements", "bandlimit", std::to_string(archive.bandlimit));
    header.set("measurements", "noise_sigma", format_exact(archive.noise_sigma));
    header.set("measurements", "seed", std::to_string(archive.seed));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "TOFM1\n" << header.serialize() << "---\n";
    append_f64(out, archive.y);
    append_f64(out, archive.m);
    if (!out) throw IoError("write failed for " + path);
}

MeasurementArchive load_measurement_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "TOFM1")
        throw IoError(path + ": not a measurement archive");
    std::string header_text;
    while (std::getline(in, line)) {
        if (line == "---") break;
        header_text += line;
        header_text += "\n";
    }
    const KeyValueDocument header = KeyValueDocument::parse(header_text);

    MeasurementArchive a;
    a.width = static_cast<int>(header.get_int("measurements", "width"));
    a.height = static_cast<int>(header.get_int("measurements", "height"));
    a.n_samples = static_cast<int>(header.get_int("measurements", "n"));
    a.delta_s = header.get_double("measurements", "delta_ps") * 1e-12;
    a.period_s = header.get_double("measurements", "period_ps") * 1e-12;
    a.bandlimit = static_cast<int>(header.get_int("measurements", "bandlimit"));
    a.noise_sigma = header.get_double("measurements", "noise_sigma");
    a.seed = static_cast<std::uint64_t>(header.get_int("measurements", "seed"));
    if (a.width <= 0 || a.height <= 0 || a.n_samples <= 0)
        throw IoError(path + ": malformed measurement header");

    const std::size_t expected =
        static_cast<std::size_t>(a.width) * a.height * static_cast<std::size_t>(a.n_samples);
    a.y.resize(expected);
    a.m.resize(expected);
    read_f64(in, a.y, path);
    read_f64(in, a.m, path);
    return a;
}

} // namespace tofpr

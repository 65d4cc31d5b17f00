#include "llsi/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace llsi {

using detail::format;
using detail::format_double;

int ScanParams::width_px() const { return (int)std::llround(region_w / pixel_pitch_um); }
int ScanParams::height_px() const { return (int)std::llround(region_h / pixel_pitch_um); }

void ScanParams::check() const {
    if (pixel_pitch_um <= 0) throw ArgumentError("pixel pitch must be positive");
    if (numerical_aperture <= 0 || numerical_aperture > 1)
        throw ArgumentError("numerical aperture must be in (0, 1]");
    if (dwell_ms_per_px <= 0) throw ArgumentError("dwell time must be positive");
    if (bandpass_hz <= 0) throw ArgumentError("bandpass must be positive");
    if (wavelength_um <= 0) throw ArgumentError("wavelength must be positive");
    if (width_px() < 1 || height_px() < 1)
        throw ArgumentError(format("scan region %gx%g um yields zero pixels at pitch %g",
                                   region_w, region_h, pixel_pitch_um));
}

ImageF Image16::to_float() const {
    ImageF out(width, height);
    for (size_t i = 0; i < pixels.size(); ++i) out.v[i] = dequant(i);
    return out;
}

Image16 quantize_image(const ImageF& img, const ScanParams& scan, ImageKind kind,
                       double sigma_hint) {
    if (img.v.empty()) throw ArgumentError("cannot quantize an empty image");
    auto [mn_it, mx_it] = std::minmax_element(img.v.begin(), img.v.end());
    double lo = *mn_it - 3.0 * sigma_hint;
    double hi = *mx_it + 3.0 * sigma_hint;

    Image16 out;
    out.width = img.width;
    out.height = img.height;
    out.scan = scan;
    out.kind = kind;
    out.offset = lo;
    out.scale = hi > lo ? (hi - lo) / 65535.0 : 1.0;
    out.pixels.resize(img.v.size());

    double residual = 0.0;
    for (size_t i = 0; i < img.v.size(); ++i) {
        double want = img.v[i] + residual;
        double q = std::floor((want - out.offset) / out.scale + 0.5);
        q = std::clamp(q, 0.0, 65535.0);
        out.pixels[i] = (uint16_t)q;
        residual = want - (q * out.scale + out.offset);
    }
    return out;
}

// ---- PGM ------------------------------------------------------------------

static const char* kind_name(ImageKind k) {
    return k == ImageKind::Llsi ? "llsi" : "reflectance";
}

std::string pgm_bytes(const Image16& img) {
    std::string out;
    out += "P5\n";
    out += format("#llsi-kind=%s\n", kind_name(img.kind));
    out += "#llsi-scale=" + format_double(img.scale) + "\n";
    out += "#llsi-offset=" + format_double(img.offset) + "\n";
    const ScanParams& s = img.scan;
    out += "#llsi-pitch-um=" + format_double(s.pixel_pitch_um) + "\n";
    out += "#llsi-region-um=" + format_double(s.region_x0) + "," + format_double(s.region_y0) +
           "," + format_double(s.region_w) + "," + format_double(s.region_h) + "\n";
    out += "#llsi-wavelength-um=" + format_double(s.wavelength_um) + "\n";
    out += "#llsi-na=" + format_double(s.numerical_aperture) + "\n";
    out += "#llsi-dwell-ms=" + format_double(s.dwell_ms_per_px) + "\n";
    out += "#llsi-bandpass-hz=" + format_double(s.bandpass_hz) + "\n";
    out += "#llsi-mod-offset-v=" + format_double(s.modulation.offset_v) + "\n";
    out += "#llsi-mod-vpp=" + format_double(s.modulation.peak_to_peak_v) + "\n";
    out += "#llsi-mod-freq-hz=" + format_double(s.modulation.freq_hz) + "\n";
    out += format("%d %d\n65535\n", img.width, img.height);
    out.reserve(out.size() + img.pixels.size() * 2);
    for (uint16_t px : img.pixels) {
        out.push_back(char(px >> 8));
        out.push_back(char(px & 0xff));
    }
    return out;
}

void write_pgm(const Image16& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write image '" + path + "'");
    std::string bytes = pgm_bytes(img);
    out.write(bytes.data(), (std::streamsize)bytes.size());
    if (!out) throw Error("short write to '" + path + "'");
}

namespace {

struct PgmReader {
    std::string_view bytes;
    size_t pos = 0;
    const std::string& origin;
    std::vector<std::string> comments;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(origin + ": " + msg);
    }

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            char c = bytes[pos];
            if (c == '#') {
                size_t eol = bytes.find('\n', pos);
                if (eol == std::string_view::npos) eol = bytes.size();
                comments.emplace_back(bytes.substr(pos, eol - pos));
                pos = eol;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string token() {
        skip_space_and_comments();
        size_t start = pos;
        while (pos < bytes.size() && !std::isspace((unsigned char)bytes[pos])) ++pos;
        if (pos == start) fail("unexpected end of header");
        return std::string(bytes.substr(start, pos - start));
    }
};

double parse_meta_double(const std::string& value, const std::string& key,
                         const std::string& origin) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str()) throw ParseError(origin + ": bad value for " + key);
    return v;
}

} // namespace

Image16 parse_pgm(std::string_view bytes, const std::string& origin) {
    PgmReader r{bytes, 0, origin, {}};
    if (r.token() != "P5") r.fail("not a binary PGM (P5) file");
    int width = std::atoi(r.token().c_str());
    int height = std::atoi(r.token().c_str());
    int maxval = std::atoi(r.token().c_str());
    if (width < 1 || height < 1) r.fail("bad dimensions");
    if (maxval != 65535) r.fail("expected 16-bit samples (maxval 65535)");
    if (r.pos >= bytes.size()) r.fail("missing sample data");
    ++r.pos;  // single whitespace after maxval

    Image16 img;
    img.width = width;
    img.height = height;
    size_t need = size_t(width) * height * 2;
    if (bytes.size() - r.pos < need) r.fail("truncated sample data");
    img.pixels.resize(size_t(width) * height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = uint16_t((uint8_t(bytes[r.pos]) << 8) | uint8_t(bytes[r.pos + 1]));
        r.pos += 2;
    }

    for (const std::string& c : r.comments) {
        std::string_view line = c;
        if (!detail::starts_with(line, "#llsi-")) continue;
        line.remove_prefix(1);
        auto eq = line.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key(line.substr(0, eq));
        std::string value(detail::trim(line.substr(eq + 1)));
        ScanParams& s = img.scan;
        if (key == "llsi-kind")
            img.kind = value == "reflectance" ? ImageKind::Reflectance : ImageKind::Llsi;
        else if (key == "llsi-scale") img.scale = parse_meta_double(value, key, origin);
        else if (key == "llsi-offset") img.offset = parse_meta_double(value, key, origin);
        else if (key == "llsi-pitch-um") s.pixel_pitch_um = parse_meta_double(value, key, origin);
        else if (key == "llsi-region-um") {
            auto parts = detail::split(value, ',');
            if (parts.size() != 4) throw ParseError(origin + ": llsi-region-um needs 4 values");
            s.region_x0 = parse_meta_double(parts[0], key, origin);
            s.region_y0 = parse_meta_double(parts[1], key, origin);
            s.region_w = parse_meta_double(parts[2], key, origin);
            s.region_h = parse_meta_double(parts[3], key, origin);
        } else if (key == "llsi-wavelength-um") s.wavelength_um = parse_meta_double(value, key, origin);
        else if (key == "llsi-na") s.numerical_aperture = parse_meta_double(value, key, origin);
        else if (key == "llsi-dwell-ms") s.dwell_ms_per_px = parse_meta_double(value, key, origin);
        else if (key == "llsi-bandpass-hz") s.bandpass_hz = parse_meta_double(value, key, origin);
        else if (key == "llsi-mod-offset-v") s.modulation.offset_v = parse_meta_double(value, key, origin);
        else if (key == "llsi-mod-vpp") s.modulation.peak_to_peak_v = parse_meta_double(value, key, origin);
        else if (key == "llsi-mod-freq-hz") s.modulation.freq_hz = parse_meta_double(value, key, origin);
    }

    if (img.scan.region_w > 0 &&
        (img.scan.width_px() != width || img.scan.height_px() != height))
        throw ParseError(origin + ": scan region metadata inconsistent with image dimensions");
    return img;
}

Image16 read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open image '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pgm(ss.str(), path);
}

// ---- PPM ------------------------------------------------------------------

std::string ppm_bytes(const ImageRGB& img) {
    std::string out = format("P6\n%d %d\n255\n", img.width, img.height);
    out.append(img.rgb.begin(), img.rgb.end());
    return out;
}

void write_ppm(const ImageRGB& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write image '" + path + "'");
    std::string bytes = ppm_bytes(img);
    out.write(bytes.data(), (std::streamsize)bytes.size());
    if (!out) throw Error("short write to '" + path + "'");
}

} // namespace llsi

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llsi/common.hpp"

namespace llsi {

struct Modulation {
    double offset_v = 1.0;
    double peak_to_peak_v = 0.2;
    double freq_hz = 80e3;
    bool operator==(const Modulation&) const = default;
};

struct ScanParams {
    double pixel_pitch_um = 0.25;
    double region_x0 = 0, region_y0 = 0;
    double region_w = 0, region_h = 0;
    double wavelength_um = 1.3;
    double numerical_aperture = 0.71;
    double dwell_ms_per_px = 3.3;
    double bandpass_hz = 100.0;
    Modulation modulation;

    int width_px() const;
    int height_px() const;
    /// Center of pixel (px, py) in um.
    double pixel_x(int px) const { return region_x0 + (px + 0.5) * pixel_pitch_um; }
    double pixel_y(int py) const { return region_y0 + (py + 0.5) * pixel_pitch_um; }

    void check() const;  // throws ArgumentError on out-of-range fields
    bool operator==(const ScanParams&) const = default;
};

enum class ImageKind { Llsi, Reflectance };

/// Real-valued working image, row-major.
struct ImageF {
    int width = 0, height = 0;
    std::vector<double> v;

    ImageF() = default;
    ImageF(int w, int h) : width(w), height(h), v(size_t(w) * h, 0.0) {}
    double& at(int x, int y) { return v[size_t(y) * width + x]; }
    double at(int x, int y) const { return v[size_t(y) * width + x]; }
};

/// 16-bit snapshot with scan metadata and the affine de-quantization map
/// value = pixel * scale + offset.
struct Image16 {
    int width = 0, height = 0;
    std::vector<uint16_t> pixels;
    ScanParams scan;
    ImageKind kind = ImageKind::Llsi;
    double scale = 1.0;
    double offset = 0.0;

    double dequant(size_t i) const { return pixels[i] * scale + offset; }
    ImageF to_float() const;
};

/// Affine 16-bit quantization of [min - 3*sigma_hint, max + 3*sigma_hint]
/// onto [0, 65535].  Residuals are carried forward along the scanline so the
/// image integral is preserved to within half a quantization step; any one
/// pixel is off by at most one step.
Image16 quantize_image(const ImageF& img, const ScanParams& scan, ImageKind kind,
                       double sigma_hint);

/// Binary PGM (P5, maxval 65535, big-endian) with `#llsi-*=` header comments
/// carrying scan metadata and the de-quantization map.
void write_pgm(const Image16& img, const std::string& path);
Image16 read_pgm(const std::string& path);

std::string pgm_bytes(const Image16& img);
Image16 parse_pgm(std::string_view bytes, const std::string& origin = "<memory>");

/// 8-bit RGB raster for overlays; persisted as binary PPM (P6).
struct ImageRGB {
    int width = 0, height = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel

    ImageRGB() = default;
    ImageRGB(int w, int h) : width(w), height(h), rgb(size_t(w) * h * 3, 0) {}
    uint8_t* px(int x, int y) { return &rgb[(size_t(y) * width + x) * 3]; }
    const uint8_t* px(int x, int y) const { return &rgb[(size_t(y) * width + x) * 3]; }
};

void write_ppm(const ImageRGB& img, const std::string& path);
std::string ppm_bytes(const ImageRGB& img);

} // namespace llsi

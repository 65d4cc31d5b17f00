#include "llsi/render.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "llsi/philox.hpp"

namespace llsi {

double psf_sigma(double wavelength_um, double numerical_aperture) {
    if (numerical_aperture <= 0 || numerical_aperture > 1)
        throw ArgumentError("numerical aperture must be in (0, 1]");
    double fwhm = wavelength_um / (2.0 * numerical_aperture);
    return fwhm / 2.35482;
}

double modulation_gain(const Modulation& m) {
    return m.peak_to_peak_v / 0.2;
}

double NoiseParams::sigma_for(const ScanParams& scan) const {
    return noise_floor * std::sqrt(scan.bandpass_hz / ref_bandpass_hz) *
           std::sqrt(ref_dwell_ms / scan.dwell_ms_per_px);
}

namespace {

// One emitter prepared for scanline deposit: separable Gaussian weights over
// a finite support, normalized so the full support sums to exactly 1.
struct Splat {
    int x0, x1, y0, y1;  // inclusive pixel bounds
    double strength;     // amplitude * gain / kernel sum
    std::vector<double> wx, wy;
};

std::vector<Splat> prepare_splats(const EmitterMap& em, const ScanParams& scan,
                                  double sigma_um, const FocusDrift& drift) {
    int w = scan.width_px(), h = scan.height_px();
    double gain = modulation_gain(scan.modulation);
    std::vector<Splat> out;
    out.reserve(em.size());
    for (const Emitter& e : em) {
        double sigma = sigma_um;
        if (drift.extra_blur_sigma_um > 0 && h > 0) {
            int row = std::clamp((int)std::floor((e.y - scan.region_y0) / scan.pixel_pitch_um),
                                 0, h - 1);
            sigma = std::hypot(sigma_um, drift.extra_blur_sigma_um * double(row) / double(h));
        }
        double sigma_px = sigma / scan.pixel_pitch_um;
        int radius = std::max(1, (int)std::ceil(4.0 * sigma_px));
        // emitter position in pixel-center coordinates
        double fx = (e.x - scan.region_x0) / scan.pixel_pitch_um - 0.5;
        double fy = (e.y - scan.region_y0) / scan.pixel_pitch_um - 0.5;
        int cx = (int)std::llround(fx), cy = (int)std::llround(fy);

        Splat s;
        s.x0 = cx - radius;
        s.x1 = cx + radius;
        s.y0 = cy - radius;
        s.y1 = cy + radius;
        if (s.x1 < 0 || s.x0 >= w || s.y1 < 0 || s.y0 >= h) continue;
        double inv2s2 = 1.0 / (2.0 * sigma_px * sigma_px);
        double sum_x = 0, sum_y = 0;
        s.wx.resize(size_t(s.x1 - s.x0 + 1));
        s.wy.resize(size_t(s.y1 - s.y0 + 1));
        for (int x = s.x0; x <= s.x1; ++x) {
            double d = x - fx;
            sum_x += s.wx[size_t(x - s.x0)] = std::exp(-d * d * inv2s2);
        }
        for (int y = s.y0; y <= s.y1; ++y) {
            double d = y - fy;
            sum_y += s.wy[size_t(y - s.y0)] = std::exp(-d * d * inv2s2);
        }
        s.strength = e.amplitude * gain / (sum_x * sum_y);
        out.push_back(std::move(s));
    }
    return out;
}

// Runs fn(row) for every row, split over workers.  Output written by fn must
// depend only on the row index for the partitioning to be invisible.
void for_rows(int rows, int workers, const std::function<void(int)>& fn) {
    if (workers <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        workers = (int)std::clamp(hw, 1u, 8u);
    }
    workers = std::min(workers, rows);
    if (workers <= 1) {
        for (int y = 0; y < rows; ++y) fn(y);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (int y = t; y < rows; y += workers) fn(y);
        });
    for (auto& th : pool) th.join();
}

} // namespace

Image16 render_llsi(const EmitterMap& em, const ScanParams& scan, const NoiseParams& noise,
                    int workers) {
    scan.check();
    if (noise.noise_floor < 0) throw ArgumentError("noise floor must be non-negative");
    if (!std::isfinite(noise.focus_drift.gain_slope) ||
        !std::isfinite(noise.focus_drift.extra_blur_sigma_um) ||
        noise.focus_drift.extra_blur_sigma_um < 0)
        throw ArgumentError("focus drift parameters must be finite and non-negative");
    int w = scan.width_px(), h = scan.height_px();
    double sigma_um = psf_sigma(scan.wavelength_um, scan.numerical_aperture);
    auto splats = prepare_splats(em, scan, sigma_um, noise.focus_drift);

    // row -> splats that touch it, preserving emitter order
    std::vector<std::vector<int>> rows_index;
    rows_index.resize(size_t(h));
    for (int i = 0; i < (int)splats.size(); ++i)
        for (int y = std::max(0, splats[i].y0); y <= std::min(h - 1, splats[i].y1); ++y)
            rows_index[size_t(y)].push_back(i);

    double sigma_n = noise.sigma_for(scan);
    ImageF img(w, h);
    for_rows(h, workers, [&](int y) {
        double* row = &img.v[size_t(y) * w];
        for (int i : rows_index[size_t(y)]) {
            const Splat& s = splats[i];
            double fy = s.strength * s.wy[size_t(y - s.y0)];
            int xa = std::max(0, s.x0), xb = std::min(w - 1, s.x1);
            for (int x = xa; x <= xb; ++x) row[size_t(x)] += fy * s.wx[size_t(x - s.x0)];
        }
        if (noise.focus_drift.gain_slope != 0) {
            double g = 1.0 + noise.focus_drift.gain_slope * double(y) / double(h);
            for (int x = 0; x < w; ++x) row[size_t(x)] *= g;
        }
        if (sigma_n > 0)
            for (int x = 0; x < w; ++x)
                row[size_t(x)] += sigma_n * counter_normal(noise.seed, uint32_t(x), uint32_t(y));
    });

    return quantize_image(img, scan, ImageKind::Llsi, sigma_n);
}

namespace {

double reflectance_level(DeviceClass cls) {
    switch (cls) {
    case DeviceClass::Lut: return 0.55;
    case DeviceClass::Ff: return 0.75;
    case DeviceClass::SwitchBox: return 0.35;
    }
    return 0.0;
}

constexpr double kBackgroundReflectance = 0.15;

} // namespace

Image16 render_reflectance(const FloorPlan& fp, const ScanParams& scan, int workers) {
    scan.check();
    int w = scan.width_px(), h = scan.height_px();
    double sigma = psf_sigma(scan.wavelength_um, scan.numerical_aperture);
    double inv_s2 = 1.0 / (sigma * std::sqrt(2.0));

    // Gaussian-blurred box: separable product of erf differences.  Each
    // device only touches pixels within 4 sigma of its rectangle.
    double margin = 4.0 * sigma;
    struct Box {
        Rect rect;
        double level;
        int xa, xb, ya, yb;
    };
    std::vector<Box> boxes;
    boxes.reserve(fp.devices.size());
    for (const DeviceRect& d : fp.devices) {
        Box b;
        b.rect = d.rect;
        b.level = reflectance_level(d.cls) - kBackgroundReflectance;
        b.xa = std::max(0, (int)std::floor((d.rect.x0 - margin - scan.region_x0) /
                                           scan.pixel_pitch_um));
        b.xb = std::min(w - 1, (int)std::ceil((d.rect.x1 + margin - scan.region_x0) /
                                              scan.pixel_pitch_um));
        b.ya = std::max(0, (int)std::floor((d.rect.y0 - margin - scan.region_y0) /
                                           scan.pixel_pitch_um));
        b.yb = std::min(h - 1, (int)std::ceil((d.rect.y1 + margin - scan.region_y0) /
                                              scan.pixel_pitch_um));
        if (b.xa <= b.xb && b.ya <= b.yb) boxes.push_back(b);
    }

    ImageF img(w, h);
    for_rows(h, workers, [&](int y) {
        double cy = scan.pixel_y(y);
        double* row = &img.v[size_t(y) * w];
        for (int x = 0; x < w; ++x) row[size_t(x)] = kBackgroundReflectance;
        for (const Box& b : boxes) {
            if (y < b.ya || y > b.yb) continue;
            double fy = 0.5 * (std::erf((b.rect.y1 - cy) * inv_s2) -
                               std::erf((b.rect.y0 - cy) * inv_s2));
            double level = b.level * fy;
            for (int x = b.xa; x <= b.xb; ++x) {
                double cx = scan.pixel_x(x);
                double fx = 0.5 * (std::erf((b.rect.x1 - cx) * inv_s2) -
                                   std::erf((b.rect.x0 - cx) * inv_s2));
                row[size_t(x)] += level * fx;
            }
        }
    });

    return quantize_image(img, scan, ImageKind::Reflectance, 0.0);
}

} // namespace llsi

#pragma once

#include <string>
#include <vector>

#include "llsi/floorplan.hpp"
#include "llsi/image.hpp"

namespace llsi {

struct AnalysisParams {
    int max_shift_px = 10;
    double z_threshold = 5.0;
    int min_area_px = 0;  // 0 = derive the PSF footprint from the scan metadata
    bool despeckle = true;

    /// ceil(pi * (FWHM/2)^2 / pitch^2) for the image's scan parameters.
    static int default_min_area(const ScanParams& scan);
    int effective_min_area(const ScanParams& scan) const;
};

enum class Polarity { Positive, Negative, Mixed };
std::string polarity_name(Polarity p);

struct DiffComponent {
    double centroid_x_um = 0, centroid_y_um = 0;
    int bbox_x0 = 0, bbox_y0 = 0, bbox_x1 = 0, bbox_y1 = 0;  // inclusive, px
    int area_px = 0;
    double peak_z = 0;
    Polarity polarity = Polarity::Mixed;
    std::vector<CellRef> cells;
};

enum class Verdict { Clean, Tampered };

struct DiffReport {
    Verdict verdict = Verdict::Clean;
    int shift_dx = 0, shift_dy = 0;
    double noise_sigma = 0;
    double z_threshold = 0;
    int min_area_px = 0;
    bool despeckle = true;
    std::vector<DiffComponent> components;
    std::string golden_id;
    std::string suspect_id;
};

struct Registration {
    int dx = 0, dy = 0;
    Image16 aligned;  // suspect shifted onto the golden grid, median-filled borders
};

/// Best integer shift within +-max_shift by normalized cross-correlation:
/// suspect(x + dx, y + dy) lines up with golden(x, y).
Registration register_images(const Image16& golden, const Image16& suspect, int max_shift_px);

/// De-quantizes, subtracts the median, divides by 1.4826 * MAD.  Invariant
/// under positive affine intensity changes.  Throws on constant images.
ImageF normalize(const Image16& img);

ImageF subtract(const ImageF& a, const ImageF& b);

/// 3x3 median filter with edge replication.
ImageF despeckle(const ImageF& img);

/// Robust sigma: 1.4826 * median(|v - median(v)|).  Needs >= 100 pixels.
double estimate_noise_sigma(const ImageF& diff);

/// Pixels with |diff| > k * sigma, 8-connected, area-gated.
std::vector<DiffComponent> threshold_components(const ImageF& diff, double sigma,
                                                const AnalysisParams& params,
                                                const ScanParams& scan);

/// Fills each component's cells with the distinct floorplan devices
/// overlapping its bounding box.
void localize(std::vector<DiffComponent>& components, const FloorPlan& fp,
              const ScanParams& scan);

/// Grayscale reflectance base; pixels above +k*sigma tinted green, below
/// -k*sigma tinted yellow.
ImageRGB render_overlay(const Image16& reflectance, const ImageF& diff, double sigma,
                        const AnalysisParams& params);

struct CompareResult {
    DiffReport report;
    ImageF diff;         // the thresholded field (despeckled when enabled)
    double sigma = 0;    // robust sigma of diff
};

/// Full pipeline: register, normalize both, subtract, despeckle, estimate
/// sigma, threshold, extract components, localize.  Stage failures are
/// rethrown with the stage name prefixed.
CompareResult compare_snapshots(const Image16& golden, const Image16& suspect,
                                const FloorPlan& fp, const AnalysisParams& params,
                                const std::string& golden_id = {},
                                const std::string& suspect_id = {});

std::string format_report(const DiffReport& report);
void write_report(const DiffReport& report, const std::string& path);

} // namespace llsi

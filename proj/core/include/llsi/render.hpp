#pragma once

#include "llsi/emitters.hpp"
#include "llsi/image.hpp"

namespace llsi {

struct FocusDrift {
    double gain_slope = 0.0;         // relative gain added linearly over the scan
    double extra_blur_sigma_um = 0;  // additional blur sigma reached at the last row
    bool operator==(const FocusDrift&) const = default;
};

struct NoiseParams {
    double noise_floor = 5e-4;     // per-pixel sigma at the reference dwell/bandpass
    double ref_dwell_ms = 3.3;
    double ref_bandpass_hz = 100.0;
    FocusDrift focus_drift;
    uint64_t seed = 0;

    /// Effective per-pixel sigma for a scan: noise_floor scaled by
    /// sqrt(bandpass/ref_bandpass) * sqrt(ref_dwell/dwell).
    double sigma_for(const ScanParams& scan) const;
};

/// Gaussian beam spot size: FWHM = wavelength / (2 NA), sigma = FWHM / 2.35482.
double psf_sigma(double wavelength_um, double numerical_aperture);

/// Modulation gain relative to the 200 mV reference peak-to-peak amplitude.
double modulation_gain(const Modulation& m);

/// Renders the emitter map under the scan: each emitter deposits its
/// amplitude through a unit-sum discrete Gaussian kernel, scaled by the
/// modulation gain; per-pixel Gaussian noise is keyed by (seed, x, y) so the
/// result is bitwise identical no matter how rows are partitioned across
/// workers.
Image16 render_llsi(const EmitterMap& em, const ScanParams& scan, const NoiseParams& noise,
                    int workers = 0);

/// Noise-free structural image: device rectangles at kind-dependent
/// reflectance levels, blurred by the same PSF.
Image16 render_reflectance(const FloorPlan& fp, const ScanParams& scan, int workers = 0);

} // namespace llsi

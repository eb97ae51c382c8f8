#pragma once

#include <optional>
#include <vector>

#include "speckle/frame.hpp"
#include "speckle/stabilizer.hpp"

namespace speckle::pipe {

// Centered crop box: columns [cx - half_width, cx + half_width] and rows
// [cy - half_height, cy + half_height], both inclusive.
struct CropRegion {
    int cx = 0;
    int cy = 0;
    int half_width = 1;
    int half_height = 1;

    int x0() const { return cx - half_width; }
    int x1() const { return cx + half_width; } // inclusive
    int y0() const { return cy - half_height; }
    int y1() const { return cy + half_height; } // inclusive
    int width() const { return 2 * half_width + 1; }
    int height() const { return 2 * half_height + 1; }

    bool inside(const Frame& f) const {
        return x0() >= 0 && y0() >= 0 && x1() < f.width && y1() < f.height;
    }
};

struct CorrelationCurve {
    std::vector<int> lags;            // 0..9 in selected-frame units
    std::vector<double> coefficients; // coefficients[0] == 1 exactly
    double viscosity_coefficient = 1.0; // coefficients[1]
    std::optional<double> tau_c;      // decorrelation constant in frames
};

// Grows a centered box until it would touch a pixel brighter than
// bright_threshold (static speckle candidates, a 9x9 neighborhood of the
// center excluded) or reaches min(max_size, image bounds). Growth
// alternates width/height; the first mask contact stops both axes.
CropRegion crop_dynamic(const Frame& frame, int bright_threshold = 200, int max_size = 1000);

// Largest region fully inside the frame, for analyses of full-field images.
CropRegion full_region(const Frame& frame);

// Centered region of at most size x size pixels.
CropRegion centered_region(const Frame& frame, int size);

// Pearson correlation of pixel intensities over the region. Throws
// DegenerateFrameError if either frame has zero variance in the region.
double frame_correlation(const Frame& a, const Frame& b, const CropRegion& region);

// coefficients[k] = frame_correlation(frame[s0], frame[sk]) over the
// selected frames; V = coefficients[1].
CorrelationCurve correlation_curve(const FrameSequence& seq, const stab::FrameSelection& selection,
                                   const CropRegion& region);

// Least-squares fit of c(k) ~ b + (1-b)*exp(-k/tau_c) with the plateau b
// anchored at c(9), via golden-section search on tau_c. Returns nullopt
// for non-decaying curves (c[1] >= 0.999).
std::optional<double> fit_tau_c(const CorrelationCurve& curve);

// Spatial speckle contrast K = sigma / mean over the region (population
// normalization). Throws DegenerateFrameError on zero mean.
double speckle_contrast(const Frame& frame, const CropRegion& region);

} // namespace speckle::pipe

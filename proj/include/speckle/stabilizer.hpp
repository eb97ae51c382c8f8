#pragma once

#include <vector>

#include "speckle/frame.hpp"

namespace speckle::stab {

struct IntensityTrace {
    std::vector<double> values;     // per-frame mean pixel intensity
    std::vector<double> normalized; // rescaled to [0, 1]
};

struct FrameSelection {
    std::vector<int> indices; // strictly increasing frame indices
    double range_score = 0.0; // max - min of their normalized trace values
};

// Per-frame arithmetic mean of pixels, normalized (v - min)/(max - min).
// Throws DegenerateTraceError when max == min.
IntensityTrace compute_trace(const FrameSequence& seq);

// Interior local maxima (>= both neighbors); a plateau of equal values
// contributes only its first index; endpoints are excluded.
std::vector<int> find_peaks(const IntensityTrace& trace);

// Keeps peaks whose normalized value is >= threshold.
std::vector<int> filter_threshold(const std::vector<int>& peaks, const IntensityTrace& trace,
                                  double threshold = 0.85);

// Over all windows of n consecutive surviving peaks, the one minimizing
// (max - min) of their normalized values; ties broken by earliest start.
// Throws InsufficientPeaksError when fewer than n peaks survive.
FrameSelection select_window(const std::vector<int>& peaks, const IntensityTrace& trace, int n = 10);

// compute_trace -> find_peaks -> filter_threshold -> select_window
FrameSelection stabilize(const FrameSequence& seq, double threshold = 0.85, int n = 10);

} // namespace speckle::stab

#pragma once

#include <cstdint>
#include <vector>

#include "speckle/frame.hpp"

namespace speckle::fx {

// Smartphone-capture distortions: PWM flicker, rolling-shutter bars and
// skew, plus background light and distance attenuation. Defaults chosen to
// reproduce the characteristic trace shapes (high-frequency ON-OFF comb
// with a handful of low-frequency nulls over a 10 s clip).
struct CaptureArtifactConfig {
    int flicker_period_frames = 6;
    double flicker_duty = 0.5;      // fraction of the period with speckle visible
    int bar_period_frames = 45;
    double bar_width_frac = 0.3;    // fraction of frame height obscured per bar event
    double skew_max_px = 8.0;       // max per-row horizontal shear at the bottom row
    double skew_event_prob = 0.1;
    double background_lux_offset = 8.0;
    double attenuation = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
};

// OFF frames keep a 5% speckle residual plus a 0..2 gray-level noise floor
// so downstream peak detection sees realistic non-zero minima.
inline constexpr int kNoiseFloor = 2;
inline constexpr double kOffResidual = 0.05;

FrameSequence apply_flicker(const FrameSequence& seq, const CaptureArtifactConfig& cfg);
FrameSequence apply_bars(const FrameSequence& seq, const CaptureArtifactConfig& cfg);
FrameSequence apply_skew(const FrameSequence& seq, const CaptureArtifactConfig& cfg);
FrameSequence apply_lighting(const FrameSequence& seq, const CaptureArtifactConfig& cfg);

// Fixed corpus-generator composition: flicker -> bars -> skew -> lighting.
FrameSequence distort(const FrameSequence& seq, const CaptureArtifactConfig& cfg);

// Event log helpers, used by the stabilizer cross-checks and tests.
bool frame_is_on(const CaptureArtifactConfig& cfg, int frame_index);
bool frame_has_bar(const CaptureArtifactConfig& cfg, int frame_index);
std::vector<bool> skew_events(const CaptureArtifactConfig& cfg, int frame_count);

// Number of frames one bar sweep takes to cross the full frame height.
int bar_span_frames(const CaptureArtifactConfig& cfg);

} // namespace speckle::fx

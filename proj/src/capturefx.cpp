#include "speckle/capturefx.hpp"

#include <algorithm>
#include <cmath>

#include "speckle/rng.hpp"

namespace speckle::fx {

void CaptureArtifactConfig::validate() const {
    if (flicker_period_frames < 2) throw InvalidArgument("flicker_period_frames must be >= 2");
    if (!(flicker_duty > 0.0 && flicker_duty < 1.0)) throw InvalidArgument("flicker_duty must be in (0, 1)");
    if (bar_period_frames < flicker_period_frames) {
        throw InvalidArgument("bar_period_frames must be >= flicker_period_frames");
    }
    if (!(bar_width_frac > 0.0 && bar_width_frac <= 1.0)) throw InvalidArgument("bar_width_frac must be in (0, 1]");
    if (skew_max_px < 0.0) throw InvalidArgument("skew_max_px must be >= 0");
    if (!(skew_event_prob >= 0.0 && skew_event_prob <= 1.0)) throw InvalidArgument("skew_event_prob must be in [0, 1]");
    if (!(background_lux_offset >= 0.0 && background_lux_offset <= 255.0)) {
        throw InvalidArgument("background_lux_offset must be in [0, 255]");
    }
    if (!(attenuation > 0.0 && attenuation <= 1.0)) throw InvalidArgument("attenuation must be in (0, 1]");
}

bool frame_is_on(const CaptureArtifactConfig& cfg, int frame_index) {
    const int on_count = std::clamp(
        static_cast<int>(std::llround(cfg.flicker_duty * cfg.flicker_period_frames)),
        1, cfg.flicker_period_frames - 1);
    return frame_index % cfg.flicker_period_frames < on_count;
}

int bar_span_frames(const CaptureArtifactConfig& cfg) {
    return static_cast<int>(std::ceil(1.0 / cfg.bar_width_frac));
}

bool frame_has_bar(const CaptureArtifactConfig& cfg, int frame_index) {
    return frame_index % cfg.bar_period_frames < bar_span_frames(cfg);
}

std::vector<bool> skew_events(const CaptureArtifactConfig& cfg, int frame_count) {
    std::vector<bool> events(frame_count);
    RngStream rng(cfg.seed, stream_tag::kSkewEvents);
    for (int i = 0; i < frame_count; ++i) {
        events[i] = rng.uniform() < cfg.skew_event_prob;
    }
    return events;
}

namespace {

std::uint8_t noise_sample(RngStream& rng) {
    return static_cast<std::uint8_t>(rng.next_u64() % (kNoiseFloor + 1));
}

} // namespace

FrameSequence apply_flicker(const FrameSequence& seq, const CaptureArtifactConfig& cfg) {
    cfg.validate();
    FrameSequence out = seq;
    for (std::size_t i = 0; i < out.frames.size(); ++i) {
        if (frame_is_on(cfg, static_cast<int>(i))) continue;
        RngStream rng(cfg.seed, stream_tag::kFlickerBase + i);
        for (std::uint8_t& p : out.frames[i].pixels) {
            const double v = kOffResidual * p + noise_sample(rng);
            p = static_cast<std::uint8_t>(std::min(255.0, std::round(v)));
        }
    }
    return out;
}

FrameSequence apply_bars(const FrameSequence& seq, const CaptureArtifactConfig& cfg) {
    cfg.validate();
    FrameSequence out = seq;
    const int span = bar_span_frames(cfg);
    for (std::size_t i = 0; i < out.frames.size(); ++i) {
        const int phase = static_cast<int>(i) % cfg.bar_period_frames;
        if (phase >= span) continue;
        Frame& f = out.frames[i];
        const int band = static_cast<int>(std::llround(cfg.bar_width_frac * f.height));
        const int top = static_cast<int>(phase * static_cast<long long>(f.height) / span);
        const int bottom = std::min(f.height, top + band);
        RngStream rng(cfg.seed, stream_tag::kBarBase + i);
        for (int y = top; y < bottom; ++y) {
            for (int x = 0; x < f.width; ++x) {
                f.at(x, y) = noise_sample(rng);
            }
        }
    }
    return out;
}

FrameSequence apply_skew(const FrameSequence& seq, const CaptureArtifactConfig& cfg) {
    cfg.validate();
    FrameSequence out = seq;
    const std::vector<bool> events = skew_events(cfg, static_cast<int>(seq.frames.size()));
    for (std::size_t i = 0; i < out.frames.size(); ++i) {
        if (!events[i] || cfg.skew_max_px == 0.0) continue;
        Frame& f = out.frames[i];
        RngStream rng(cfg.seed, stream_tag::kSkewEvents + 1 + i);
        for (int y = 0; y < f.height; ++y) {
            const int shift = static_cast<int>(std::llround(cfg.skew_max_px * y / f.height));
            if (shift == 0) continue;
            for (int x = f.width - 1; x >= shift; --x) {
                f.at(x, y) = f.at(x - shift, y);
            }
            for (int x = 0; x < std::min(shift, f.width); ++x) {
                f.at(x, y) = noise_sample(rng);
            }
        }
    }
    return out;
}

FrameSequence apply_lighting(const FrameSequence& seq, const CaptureArtifactConfig& cfg) {
    cfg.validate();
    FrameSequence out = seq;
    for (Frame& f : out.frames) {
        for (std::uint8_t& p : f.pixels) {
            const double v = cfg.attenuation * p + cfg.background_lux_offset;
            p = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
        }
    }
    return out;
}

FrameSequence distort(const FrameSequence& seq, const CaptureArtifactConfig& cfg) {
    return apply_lighting(apply_skew(apply_bars(apply_flicker(seq, cfg), cfg), cfg), cfg);
}

} // namespace speckle::fx

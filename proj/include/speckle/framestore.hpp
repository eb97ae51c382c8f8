#pragma once

#include <filesystem>
#include <vector>

#include "speckle/frame.hpp"

namespace speckle::io {

struct SequenceManifest {
    std::filesystem::path dir;
    double fps = 30.0;
    double shutter_s = 1.0 / 30.0;
    int width = 0;
    int height = 0;
    Channel channel = Channel::gray;
    int frame_count = 0;
};

// Interleaved 3-plane 8-bit color image (PPM P6 payload).
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; // r,g,b per pixel, row-major

    RgbFrame() = default;
    RgbFrame(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}
};

// Binary PGM (P5, maxval 255) read/write.
void write_pgm(const Frame& frame, const std::filesystem::path& path);
Frame read_pgm(const std::filesystem::path& path);

// Binary PPM (P6, maxval 255) read/write.
void write_ppm(const RgbFrame& frame, const std::filesystem::path& path);
RgbFrame read_ppm(const std::filesystem::path& path);

// Writes frame_%06d.pgm plus metadata.json into dir (created if absent).
SequenceManifest write_sequence(const FrameSequence& seq, const std::filesystem::path& dir);

// Reads a directory written by write_sequence. Error variants:
// MissingMetadataError, EmptySequenceError, MissingFrameError (names the
// first gap), MalformedFileError, DimensionMismatchError.
FrameSequence read_sequence(const std::filesystem::path& dir);

// Selects one color plane from an RGB sequence. Channel::gray is not a
// plane and is rejected. Blue is the analysis default.
FrameSequence extract_channel(const std::vector<RgbFrame>& frames, const SequenceMeta& meta,
                              Channel channel = Channel::blue);

// Removes round(leading_s*fps) leading and round(trailing_s*fps) trailing
// frames. Throws TooShortError if fewer than min_frames would remain.
FrameSequence trim_transient(const FrameSequence& seq, double leading_s = 5.0, double trailing_s = 5.0,
                             int min_frames = 10);

} // namespace speckle::io

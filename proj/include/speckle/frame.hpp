#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speckle/errors.hpp"

namespace speckle {

// 8-bit single-channel image. Row-major, top-left origin.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Frame&) const = default;
};

enum class Channel { gray, red, green, blue };

std::string channel_name(Channel c);
Channel channel_from_name(const std::string& name);

struct SequenceMeta {
    double fps = 30.0;
    double shutter_s = 1.0 / 30.0;
    int width = 0;
    int height = 0;
    Channel channel = Channel::gray;

    bool operator==(const SequenceMeta&) const = default;
};

struct FrameSequence {
    std::vector<Frame> frames;
    SequenceMeta meta;

    // Throws DimensionMismatchError if any frame disagrees with meta.
    void validate() const {
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (frames[i].width != meta.width || frames[i].height != meta.height) {
                throw DimensionMismatchError("frame " + std::to_string(i) + " is " +
                                             std::to_string(frames[i].width) + "x" + std::to_string(frames[i].height) +
                                             ", expected " + std::to_string(meta.width) + "x" + std::to_string(meta.height));
            }
        }
    }

    bool operator==(const FrameSequence&) const = default;
};

inline std::string channel_name(Channel c) {
    switch (c) {
    case Channel::gray: return "gray";
    case Channel::red: return "red";
    case Channel::green: return "green";
    case Channel::blue: return "blue";
    }
    return "gray";
}

inline Channel channel_from_name(const std::string& name) {
    if (name == "gray") return Channel::gray;
    if (name == "red") return Channel::red;
    if (name == "green") return Channel::green;
    if (name == "blue") return Channel::blue;
    throw InvalidArgument("unknown channel name: " + name);
}

} // namespace speckle

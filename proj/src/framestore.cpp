#include "speckle/framestore.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace speckle::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.pgm", index);
    return buf;
}

// Reads "P5\n<w> <h>\n255\n" allowing arbitrary whitespace and # comments.
struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
};

int read_pnm_int(std::istream& in, const fs::path& path) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) {
        throw MalformedFileError(path.string() + ": malformed PNM header");
    }
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

PnmHeader read_pnm_header(std::istream& in, const fs::path& path, const std::string& expected_magic) {
    PnmHeader h;
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    h.magic = std::string{m0, m1};
    if (!in || h.magic != expected_magic) {
        throw MalformedFileError(path.string() + ": expected " + expected_magic + " header");
    }
    h.width = read_pnm_int(in, path);
    h.height = read_pnm_int(in, path);
    h.maxval = read_pnm_int(in, path);
    if (h.width <= 0 || h.height <= 0 || h.maxval != 255) {
        throw MalformedFileError(path.string() + ": unsupported PNM dimensions or maxval");
    }
    return h;
}

} // namespace

void write_pgm(const Frame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Frame read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const PnmHeader h = read_pnm_header(in, path, "P5");
    Frame frame(h.width, h.height);
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
        throw MalformedFileError(path.string() + ": truncated PGM body");
    }
    return frame;
}

void write_ppm(const RgbFrame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.rgb.data()),
              static_cast<std::streamsize>(frame.rgb.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

RgbFrame read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const PnmHeader h = read_pnm_header(in, path, "P6");
    RgbFrame frame(h.width, h.height);
    in.read(reinterpret_cast<char*>(frame.rgb.data()),
            static_cast<std::streamsize>(frame.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.rgb.size())) {
        throw MalformedFileError(path.string() + ": truncated PPM body");
    }
    return frame;
}

SequenceManifest write_sequence(const FrameSequence& seq, const fs::path& dir) {
    seq.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir.string());

    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        write_pgm(seq.frames[i], dir / frame_name(static_cast<int>(i)));
    }

    json meta = {
        {"fps", seq.meta.fps},
        {"shutter_s", seq.meta.shutter_s},
        {"width", seq.meta.width},
        {"height", seq.meta.height},
        {"channel", channel_name(seq.meta.channel)},
        {"frame_count", seq.frames.size()},
    };
    std::ofstream out(dir / "metadata.json");
    if (!out) throw IoError("cannot write metadata.json in " + dir.string());
    out << meta.dump(2) << "\n";

    SequenceManifest manifest;
    manifest.dir = dir;
    manifest.fps = seq.meta.fps;
    manifest.shutter_s = seq.meta.shutter_s;
    manifest.width = seq.meta.width;
    manifest.height = seq.meta.height;
    manifest.channel = seq.meta.channel;
    manifest.frame_count = static_cast<int>(seq.frames.size());
    return manifest;
}

FrameSequence read_sequence(const fs::path& dir) {
    const fs::path meta_path = dir / "metadata.json";
    std::ifstream in(meta_path);
    if (!in) throw MissingMetadataError("missing metadata.json in " + dir.string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        throw MalformedFileError(meta_path.string() + ": " + e.what());
    }

    FrameSequence seq;
    try {
        seq.meta.fps = meta.at("fps").get<double>();
        seq.meta.shutter_s = meta.at("shutter_s").get<double>();
        seq.meta.width = meta.at("width").get<int>();
        seq.meta.height = meta.at("height").get<int>();
        seq.meta.channel = channel_from_name(meta.at("channel").get<std::string>());
        const int count = meta.at("frame_count").get<int>();
        if (count <= 0) throw EmptySequenceError("empty sequence in " + dir.string());
        seq.frames.reserve(count);
        for (int i = 0; i < count; ++i) {
            const fs::path p = dir / frame_name(i);
            if (!fs::exists(p)) {
                throw MissingFrameError("missing frame file " + p.string(), i);
            }
            seq.frames.push_back(read_pgm(p));
        }
    } catch (const json::exception& e) {
        throw MalformedFileError(meta_path.string() + ": " + e.what());
    }
    seq.validate();
    return seq;
}

FrameSequence extract_channel(const std::vector<RgbFrame>& frames, const SequenceMeta& meta,
                              Channel channel) {
    int offset = 0;
    switch (channel) {
    case Channel::red: offset = 0; break;
    case Channel::green: offset = 1; break;
    case Channel::blue: offset = 2; break;
    case Channel::gray:
        throw InvalidArgument("gray is not a plane of an RGB sequence");
    }
    FrameSequence out;
    out.meta = meta;
    out.meta.channel = channel;
    out.frames.reserve(frames.size());
    for (const RgbFrame& f : frames) {
        Frame plane(f.width, f.height);
        const std::size_t n = plane.pixels.size();
        for (std::size_t i = 0; i < n; ++i) {
            plane.pixels[i] = f.rgb[i * 3 + offset];
        }
        out.frames.push_back(std::move(plane));
    }
    out.validate();
    return out;
}

FrameSequence trim_transient(const FrameSequence& seq, double leading_s, double trailing_s,
                             int min_frames) {
    if (leading_s < 0.0 || trailing_s < 0.0) throw InvalidArgument("trim durations must be >= 0");
    const int lead = static_cast<int>(std::llround(leading_s * seq.meta.fps));
    const int trail = static_cast<int>(std::llround(trailing_s * seq.meta.fps));
    const int total = static_cast<int>(seq.frames.size());
    const int remaining = total - lead - trail;
    if (remaining < min_frames) {
        throw TooShortError("sequence of " + std::to_string(total) + " frames leaves " +
                                std::to_string(remaining) + " after trimming; need at least " +
                                std::to_string(min_frames),
                            min_frames + lead + trail);
    }
    FrameSequence out;
    out.meta = seq.meta;
    out.frames.assign(seq.frames.begin() + lead, seq.frames.end() - trail);
    return out;
}

} // namespace speckle::io

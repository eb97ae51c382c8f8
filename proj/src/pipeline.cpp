#include "speckle/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace speckle::pipe {

namespace {

// any pixel > threshold inside the box, skipping the 9x9 center exclusion
bool box_touches_mask(const Frame& f, int cx, int cy, int hw, int hh, int threshold) {
    for (int y = cy - hh; y <= cy + hh; ++y) {
        for (int x = cx - hw; x <= cx + hw; ++x) {
            if (std::abs(x - cx) <= 4 && std::abs(y - cy) <= 4) continue;
            if (f.at(x, y) > threshold) return true;
        }
    }
    return false;
}

} // namespace

CropRegion crop_dynamic(const Frame& frame, int bright_threshold, int max_size) {
    CropRegion box;
    box.cx = frame.width / 2;
    box.cy = frame.height / 2;
    box.half_width = 1;
    box.half_height = 1;

    const int cap = (max_size - 1) / 2;
    const int max_hw = std::min({cap, box.cx, frame.width - 1 - box.cx});
    const int max_hh = std::min({cap, box.cy, frame.height - 1 - box.cy});

    bool grew = true;
    while (grew) {
        grew = false;
        if (box.half_width < max_hw) {
            if (box_touches_mask(frame, box.cx, box.cy, box.half_width + 1, box.half_height, bright_threshold)) {
                return box;
            }
            ++box.half_width;
            grew = true;
        }
        if (box.half_height < max_hh) {
            if (box_touches_mask(frame, box.cx, box.cy, box.half_width, box.half_height + 1, bright_threshold)) {
                return box;
            }
            ++box.half_height;
            grew = true;
        }
    }
    return box;
}

CropRegion full_region(const Frame& frame) {
    CropRegion r;
    r.cx = frame.width / 2;
    r.cy = frame.height / 2;
    r.half_width = std::min(r.cx, frame.width - 1 - r.cx);
    r.half_height = std::min(r.cy, frame.height - 1 - r.cy);
    return r;
}

CropRegion centered_region(const Frame& frame, int size) {
    CropRegion r = full_region(frame);
    const int half = std::max(1, (size - 1) / 2);
    r.half_width = std::min(r.half_width, half);
    r.half_height = std::min(r.half_height, half);
    return r;
}

double frame_correlation(const Frame& a, const Frame& b, const CropRegion& region) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatchError("correlation frames differ in size");
    }
    if (!region.inside(a)) throw InvalidArgument("crop region outside frame bounds");

    // two passes, row-major accumulation in double
    double sum_a = 0.0, sum_b = 0.0;
    const std::size_t count = static_cast<std::size_t>(region.width()) * region.height();
    for (int y = region.y0(); y <= region.y1(); ++y) {
        for (int x = region.x0(); x <= region.x1(); ++x) {
            sum_a += a.at(x, y);
            sum_b += b.at(x, y);
        }
    }
    const double mean_a = sum_a / static_cast<double>(count);
    const double mean_b = sum_b / static_cast<double>(count);

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (int y = region.y0(); y <= region.y1(); ++y) {
        for (int x = region.x0(); x <= region.x1(); ++x) {
            const double da = a.at(x, y) - mean_a;
            const double db = b.at(x, y) - mean_b;
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
    }
    if (var_a == 0.0 || var_b == 0.0) {
        throw DegenerateFrameError("zero pixel variance in correlation region");
    }
    return cov / std::sqrt(var_a * var_b);
}

CorrelationCurve correlation_curve(const FrameSequence& seq, const stab::FrameSelection& selection,
                                   const CropRegion& region) {
    if (selection.indices.empty()) throw InvalidArgument("empty frame selection");
    for (int idx : selection.indices) {
        if (idx < 0 || idx >= static_cast<int>(seq.frames.size())) {
            throw InvalidArgument("selection index " + std::to_string(idx) + " out of range");
        }
    }
    CorrelationCurve curve;
    const Frame& anchor = seq.frames[selection.indices[0]];
    for (std::size_t k = 0; k < selection.indices.size(); ++k) {
        curve.lags.push_back(static_cast<int>(k));
        if (k == 0) {
            curve.coefficients.push_back(1.0); // self-correlation, exact by construction
            continue;
        }
        const int idx = selection.indices[k];
        try {
            curve.coefficients.push_back(frame_correlation(anchor, seq.frames[idx], region));
        } catch (const DegenerateFrameError&) {
            throw DegenerateFrameError("zero pixel variance at frame " + std::to_string(idx), idx);
        }
    }
    curve.viscosity_coefficient = curve.coefficients.size() > 1 ? curve.coefficients[1] : 1.0;
    curve.tau_c = fit_tau_c(curve);
    return curve;
}

std::optional<double> fit_tau_c(const CorrelationCurve& curve) {
    const std::vector<double>& c = curve.coefficients;
    if (c.size() < 3) return std::nullopt;
    if (c[1] >= 0.999) return std::nullopt; // no measurable decay

    const double b = c.back(); // plateau anchored at the last point
    auto sse = [&](double tau) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double model = b + (1.0 - b) * std::exp(-static_cast<double>(k) / tau);
            const double r = c[k] - model;
            acc += r * r;
        }
        return acc;
    };

    // golden-section search, tolerance 1e-4
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-3, hi = 1e3;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = sse(x1), f2 = sse(x2);
    while (hi - lo > 1e-4) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sse(x2);
        }
    }
    return 0.5 * (lo + hi);
}

double speckle_contrast(const Frame& frame, const CropRegion& region) {
    if (!region.inside(frame)) throw InvalidArgument("crop region outside frame bounds");
    double sum = 0.0;
    const std::size_t count = static_cast<std::size_t>(region.width()) * region.height();
    for (int y = region.y0(); y <= region.y1(); ++y) {
        for (int x = region.x0(); x <= region.x1(); ++x) sum += frame.at(x, y);
    }
    const double mean = sum / static_cast<double>(count);
    if (mean == 0.0) throw DegenerateFrameError("zero mean intensity in region");
    double var = 0.0;
    for (int y = region.y0(); y <= region.y1(); ++y) {
        for (int x = region.x0(); x <= region.x1(); ++x) {
            const double d = frame.at(x, y) - mean;
            var += d * d;
        }
    }
    return std::sqrt(var / static_cast<double>(count)) / mean;
}

} // namespace speckle::pipe

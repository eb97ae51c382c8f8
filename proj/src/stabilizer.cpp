#include "speckle/stabilizer.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace speckle::stab {

IntensityTrace compute_trace(const FrameSequence& seq) {
    IntensityTrace trace;
    trace.values.reserve(seq.frames.size());
    for (const Frame& f : seq.frames) {
        double sum = 0.0;
        for (std::uint8_t p : f.pixels) sum += p;
        trace.values.push_back(f.pixels.empty() ? 0.0 : sum / static_cast<double>(f.pixels.size()));
    }
    const auto [lo, hi] = std::minmax_element(trace.values.begin(), trace.values.end());
    if (trace.values.empty() || *hi == *lo) {
        throw DegenerateTraceError("constant intensity trace, normalization undefined");
    }
    trace.normalized.reserve(trace.values.size());
    for (double v : trace.values) {
        trace.normalized.push_back((v - *lo) / (*hi - *lo));
    }
    return trace;
}

std::vector<int> find_peaks(const IntensityTrace& trace) {
    const std::vector<double>& v = trace.values;
    std::vector<int> peaks;
    int prev_candidate = -2;
    for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i) {
        if (v[i] < v[i - 1] || v[i] < v[i + 1]) continue;
        // a plateau of qualifying equal values contributes only its first index
        const bool same_plateau = (prev_candidate == i - 1 && v[i] == v[i - 1]);
        prev_candidate = i;
        if (!same_plateau) peaks.push_back(i);
    }
    return peaks;
}

std::vector<int> filter_threshold(const std::vector<int>& peaks, const IntensityTrace& trace,
                                  double threshold) {
    std::vector<int> kept;
    for (int i : peaks) {
        if (trace.normalized[i] >= threshold) kept.push_back(i);
    }
    return kept;
}

FrameSelection select_window(const std::vector<int>& peaks, const IntensityTrace& trace, int n) {
    if (n < 1) throw InvalidArgument("window size must be >= 1");
    const int m = static_cast<int>(peaks.size());
    if (m < n) {
        throw InsufficientPeaksError("need " + std::to_string(n) + " surviving peaks, found " +
                                         std::to_string(m),
                                     m);
    }
    int best_start = 0;
    double best_range = std::numeric_limits<double>::infinity();
    for (int s = 0; s + n <= m; ++s) {
        double lo = trace.normalized[peaks[s]];
        double hi = lo;
        for (int k = 1; k < n; ++k) {
            const double v = trace.normalized[peaks[s + k]];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double range = hi - lo;
        if (range < best_range) { // strict: ties keep the earliest start
            best_range = range;
            best_start = s;
        }
    }
    FrameSelection sel;
    sel.indices.assign(peaks.begin() + best_start, peaks.begin() + best_start + n);
    sel.range_score = best_range;
    return sel;
}

FrameSelection stabilize(const FrameSequence& seq, double threshold, int n) {
    const IntensityTrace trace = compute_trace(seq);
    return select_window(filter_threshold(find_peaks(trace), trace, threshold), trace, n);
}

} // namespace speckle::stab

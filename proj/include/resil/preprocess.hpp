#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "resil/common.hpp"
#include "resil/segmentation.hpp"
#include "resil/series.hpp"

namespace resil {

/// Noise-removal settings applied ahead of all analysis. When both filters
/// are enabled the value-update filter runs first.
struct FilterConfig {
    double update_threshold = 0.0;  // delta in (0, 1]; 0 disables the filter
    bool smoothing = false;
    std::size_t max_segments = 12;
};

/// Threshold-based value update filter: sample 0 is accepted; sample i is
/// accepted iff its value moved more than delta away from the last accepted
/// value. Every output sample carries the last accepted value, so
/// timestamps are untouched and no levels are invented.
inline TimeSeries value_update_filter(const TimeSeries& s, double delta) {
    if (!(delta > 0.0) || delta > 1.0) {
        throw DomainError("value update threshold must lie in (0, 1], got " +
                          std::to_string(delta));
    }
    TimeSeries out = s;
    double accepted = s.values.front();
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (std::fabs(s.values[i] - accepted) > delta) {
            accepted = s.values[i];
        }
        out.values[i] = accepted;
    }
    return out;
}

/// Result of piecewise-linear smoothing: the re-valued series plus the
/// segment count the model selection settled on.
struct SmoothResult {
    TimeSeries series;
    std::size_t segments = 0;
};

/// Replaces every value with the fitted value of the optimal piecewise-
/// linear model (segment count selected up to max_segments), clamped back
/// into [0, 1]. Timestamps are preserved exactly.
inline SmoothResult linreg_smooth(const TimeSeries& s, std::size_t max_segments,
                                  std::size_t budget = 0, std::uint64_t seed = 0) {
    if (max_segments < 1) {
        throw DomainError("max_segments must be at least 1");
    }
    Segmentation seg = select_k(s, max_segments, budget, seed);
    std::vector<double> fitted = fitted_values(s, seg);
    SmoothResult out;
    out.series = s;
    out.segments = seg.segment_count();
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        out.series.values[i] = std::clamp(fitted[i], 0.0, 1.0);
    }
    return out;
}

}  // namespace resil

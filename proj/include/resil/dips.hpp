#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "resil/common.hpp"
#include "resil/metrics.hpp"
#include "resil/segmentation.hpp"
#include "resil/series.hpp"

namespace resil {

/// A disruption interval: onset t_start, settling point t_end, and the
/// performance minimum between them.
struct Dip {
    double t_start = 0.0;
    double t_end = 0.0;
    double t_min = 0.0;
    double q_before = 0.0;
    double q_after = 0.0;
    double q_min = 0.0;

    double length() const { return t_end - t_start; }
};

enum class DipMode { manual, max, threshold, linreg };

inline const char* dip_mode_name(DipMode m) {
    switch (m) {
        case DipMode::manual: return "manual";
        case DipMode::max: return "max";
        case DipMode::threshold: return "threshold";
        case DipMode::linreg: return "linreg";
    }
    return "max";
}

/// Which settling convention a detector uses for t_end.
inline const char* settling_convention(DipMode m) {
    switch (m) {
        case DipMode::manual: return "user-interval";
        case DipMode::max: return "next-local-maximum";
        case DipMode::threshold: return "threshold-recross";
        case DipMode::linreg: return "next-steady-segment";
    }
    return "next-local-maximum";
}

/// Detector parameters. slope_tol < 0 selects the default tolerance of
/// 0.01 value units per mean sample spacing; theta < 0 means unset.
struct DipConfig {
    DipMode mode = DipMode::max;
    double theta = -1.0;
    double slope_tol = -1.0;
    std::size_t k_max = 12;
    std::size_t budget = 0;  // 0 = no cap (exhaustive)
    std::uint64_t seed = 0;
};

/// Default steady-state slope tolerance: 0.01 value units per mean sample
/// spacing, converted to absolute value/time units.
inline double default_slope_tol(const TimeSeries& s) {
    double mean_spacing = (s.t_last() - s.t_first()) / static_cast<double>(s.size() - 1);
    return 0.01 / mean_spacing;
}

namespace detail {

/// Builds a dip from boundary anchors, locating the minimum over the raw
/// interpolant and lowering it to the boundary values if they sit deeper,
/// so q_min <= min(q_before, q_after) holds for fitted boundaries too.
inline Dip make_dip(const TimeSeries& s, double t_start, double t_end, double q_before,
                    double q_after) {
    Dip d;
    d.t_start = t_start;
    d.t_end = t_end;
    d.q_before = q_before;
    d.q_after = q_after;
    auto [tm, qm] = min_point(s, t_start, t_end);
    d.t_min = tm;
    d.q_min = qm;
    if (q_before < d.q_min) {
        d.t_min = t_start;
        d.q_min = q_before;
    }
    if (q_after < d.q_min) {
        d.t_min = t_end;
        d.q_min = q_after;
    }
    return d;
}

}  // namespace detail

/// User-provided dip intervals; q anchors come from the interpolant and
/// the minimum from the interpolant over each interval.
inline std::vector<Dip> manual_dips(const TimeSeries& s,
                                    std::vector<std::pair<double, double>> intervals) {
    for (const auto& [a, b] : intervals) {
        if (!(a < b)) {
            throw ValidationError("series \"" + s.name + "\": dip interval [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "] is empty");
        }
        if (a < s.t_first() || b > s.t_last()) {
            throw RangeError("series \"" + s.name + "\": dip interval [" + std::to_string(a) +
                             ", " + std::to_string(b) + "] outside sampled domain");
        }
    }
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        if (intervals[i].first < intervals[i - 1].second) {
            throw ValidationError("series \"" + s.name + "\": dip intervals [" +
                                  std::to_string(intervals[i - 1].first) + ", " +
                                  std::to_string(intervals[i - 1].second) + "] and [" +
                                  std::to_string(intervals[i].first) + ", " +
                                  std::to_string(intervals[i].second) + "] overlap");
        }
    }
    std::vector<Dip> dips;
    for (const auto& [a, b] : intervals) {
        dips.push_back(detail::make_dip(s, a, b, interpolate(s, a), interpolate(s, b)));
    }
    return dips;
}

/// Sample indices of local maxima: interior samples strictly greater than
/// both neighbors, the first sample of an interior plateau flanked by lower
/// values on both sides, and either endpoint when it is >= its single
/// neighbor.
inline std::vector<std::size_t> local_maxima(const TimeSeries& s) {
    if (s.size() < 3) {
        throw SizeError("series \"" + s.name + "\": maxima detection needs at least 3 samples");
    }
    const std::vector<double>& v = s.values;
    std::size_t n = v.size();
    std::vector<std::size_t> maxima;
    if (v[0] >= v[1]) {
        maxima.push_back(0);
    }
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (j + 1 < n && v[i - 1] < v[i] && v[j + 1] < v[i]) {
            maxima.push_back(i);
        }
        i = j + 1;
    }
    if (v[n - 1] >= v[n - 2]) {
        maxima.push_back(n - 1);
    }
    return maxima;
}

/// Dip per consecutive local-maxima pair that has at least one sample
/// strictly below both maxima between them. Monotone and constant series
/// yield no dips.
inline std::vector<Dip> max_dips(const TimeSeries& s) {
    std::vector<std::size_t> maxima = local_maxima(s);
    std::vector<Dip> dips;
    for (std::size_t m = 1; m < maxima.size(); ++m) {
        std::size_t a = maxima[m - 1];
        std::size_t b = maxima[m];
        double rim = std::min(s.values[a], s.values[b]);
        bool lower = false;
        for (std::size_t k = a + 1; k < b; ++k) {
            if (s.values[k] < rim) {
                lower = true;
                break;
            }
        }
        if (!lower) continue;
        dips.push_back(
            detail::make_dip(s, s.times[a], s.times[b], s.values[a], s.values[b]));
    }
    return dips;
}

/// One dip per maximal strictly-below-theta episode, anchored at the
/// interpolated crossings (clamped to the series edges when it starts or
/// ends below theta). At interior crossings q_before = q_after = theta by
/// construction.
inline std::vector<Dip> threshold_dips(const TimeSeries& s, double theta) {
    ThresholdStats stats =
        threshold_stats(s, AnalysisWindow(s.t_first(), s.t_last()), theta);
    std::vector<Dip> dips;
    for (const ThresholdEpisode& e : stats.episodes) {
        double qb = e.enter == s.t_first() ? s.values.front() : theta;
        double qa = e.exit == s.t_last() ? s.values.back() : theta;
        dips.push_back(detail::make_dip(s, e.enter, e.exit, qb, qa));
    }
    return dips;
}

/// linreg_dips output plus the fit it was derived from.
struct LinregDips {
    std::vector<Dip> dips;
    Segmentation segmentation;
    double slope_tol = 0.0;  // resolved tolerance actually applied
};

/// Segmentation-based detection: segments with |slope| <= slope_tol are
/// steady; each maximal run of non-steady segments becomes one dip running
/// from the end of the preceding steady segment to the start of the
/// following one (series edges when unbracketed). Boundary q values come
/// from the fitted steady lines, clamped to [0, 1]; raw values at edges.
inline LinregDips linreg_dips_detailed(const TimeSeries& s, const DipConfig& config) {
    double tol = config.slope_tol < 0.0 ? default_slope_tol(s) : config.slope_tol;
    Segmentation seg = select_k(s, config.k_max, config.budget, config.seed);
    std::size_t k = seg.segment_count();
    std::vector<bool> steady(k);
    for (std::size_t j = 0; j < k; ++j) {
        steady[j] = std::fabs(seg.segments[j].slope) <= tol;
    }
    std::vector<Dip> dips;
    std::size_t j = 0;
    while (j < k) {
        if (steady[j]) {
            ++j;
            continue;
        }
        std::size_t run_end = j;
        while (run_end + 1 < k && !steady[run_end + 1]) ++run_end;
        double t_start, q_before;
        if (j > 0) {
            t_start = s.times[seg.breakpoints[j]];
            q_before = std::clamp(seg.segments[j - 1].at(t_start), 0.0, 1.0);
        } else {
            t_start = s.t_first();
            q_before = s.values.front();
        }
        double t_end, q_after;
        if (run_end + 1 < k) {
            t_end = s.times[seg.breakpoints[run_end + 1]];
            q_after = std::clamp(seg.segments[run_end + 1].at(t_end), 0.0, 1.0);
        } else {
            t_end = s.t_last();
            q_after = s.values.back();
        }
        dips.push_back(detail::make_dip(s, t_start, t_end, q_before, q_after));
        j = run_end + 1;
    }
    return LinregDips{std::move(dips), std::move(seg), tol};
}

inline std::vector<Dip> linreg_dips(const TimeSeries& s, const DipConfig& config) {
    return linreg_dips_detailed(s, config).dips;
}

/// Mode dispatcher. Manual mode reads `intervals`; threshold mode requires
/// config.theta in [0, 1].
inline std::vector<Dip> detect_dips(const TimeSeries& s, const DipConfig& config,
                                    const std::vector<std::pair<double, double>>& intervals = {}) {
    switch (config.mode) {
        case DipMode::manual:
            return manual_dips(s, intervals);
        case DipMode::max:
            return max_dips(s);
        case DipMode::threshold:
            if (config.theta < 0.0) {
                throw ConfigError("threshold dip detection requires a threshold value");
            }
            return threshold_dips(s, config.theta);
        case DipMode::linreg:
            return linreg_dips(s, config);
    }
    return {};
}

}  // namespace resil

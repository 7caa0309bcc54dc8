#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "resil/common.hpp"

namespace resil {

/// A named quality-of-service trajectory: strictly increasing sample times
/// and normalized quality values in [0, 1].
struct TimeSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    double t_first() const { return times.front(); }
    double t_last() const { return times.back(); }

    /// Throws ValidationError naming this series and the offending index
    /// when any invariant fails.
    void validate() const {
        const std::string tag = "series \"" + name + "\": ";
        if (times.size() != values.size()) {
            throw ValidationError(tag + "time and value arrays differ in length (" +
                                  std::to_string(times.size()) + " vs " +
                                  std::to_string(values.size()) + ")");
        }
        if (times.size() < 2) {
            throw ValidationError(tag + "needs at least 2 samples, got " +
                                  std::to_string(times.size()));
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i])) {
                throw ValidationError(tag + "non-finite time at index " + std::to_string(i));
            }
            if (!std::isfinite(values[i])) {
                throw ValidationError(tag + "non-finite value at index " + std::to_string(i));
            }
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i] > times[i - 1])) {
                throw ValidationError(tag + "times not strictly increasing at index " +
                                      std::to_string(i));
            }
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0 || values[i] > 1.0) {
                throw ValidationError(tag + "value " + std::to_string(values[i]) +
                                      " at index " + std::to_string(i) + " outside [0, 1]");
            }
        }
    }
};

/// A closed analysis interval [t0, t1] with t0 < t1.
struct AnalysisWindow {
    double t0;
    double t1;

    AnalysisWindow(double start, double end) : t0(start), t1(end) {
        if (!std::isfinite(start) || !std::isfinite(end)) {
            throw RangeError("analysis window bounds must be finite");
        }
        if (!(start < end)) {
            throw RangeError("analysis window needs t0 < t1, got [" + std::to_string(start) +
                             ", " + std::to_string(end) + "]");
        }
    }

    double length() const { return t1 - t0; }

    bool contains(double t) const { return t >= t0 && t <= t1; }
};

/// Value of the piecewise-linear interpolant at time t.
/// Throws RangeError when t lies outside the sampled domain.
inline double interpolate(const TimeSeries& s, double t) {
    if (t < s.t_first() || t > s.t_last()) {
        throw RangeError("series \"" + s.name + "\": time " + std::to_string(t) +
                         " outside sampled domain [" + std::to_string(s.t_first()) + ", " +
                         std::to_string(s.t_last()) + "]");
    }
    if (t == s.t_first()) return s.values.front();
    if (t == s.t_last()) return s.values.back();
    // First sample time strictly greater than t; predecessor exists because
    // t >= times.front() and t < times.back().
    auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - s.times.begin());
    std::size_t lo = hi - 1;
    if (s.times[lo] == t) return s.values[lo];
    double w = (t - s.times[lo]) / (s.times[hi] - s.times[lo]);
    return s.values[lo] + w * (s.values[hi] - s.values[lo]);
}

/// Restriction of the series to [w.t0, w.t1]: all samples inside the window
/// plus interpolated boundary samples at the window edges. The window must
/// lie within the sampled domain.
inline TimeSeries slice(const TimeSeries& s, const AnalysisWindow& w) {
    if (w.t0 < s.t_first() || w.t1 > s.t_last()) {
        throw RangeError("series \"" + s.name + "\": window [" + std::to_string(w.t0) + ", " +
                         std::to_string(w.t1) + "] outside sampled domain [" +
                         std::to_string(s.t_first()) + ", " + std::to_string(s.t_last()) + "]");
    }
    TimeSeries out;
    out.name = s.name;
    out.times.push_back(w.t0);
    out.values.push_back(interpolate(s, w.t0));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.times[i] > w.t0 && s.times[i] < w.t1) {
            out.times.push_back(s.times[i]);
            out.values.push_back(s.values[i]);
        }
    }
    out.times.push_back(w.t1);
    out.values.push_back(interpolate(s, w.t1));
    return out;
}

/// Raw trapezoidal integral of the interpolant over the full sampled domain.
inline double trapezoid(const TimeSeries& s) {
    double area = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        area += 0.5 * (s.values[i] + s.values[i - 1]) * (s.times[i] - s.times[i - 1]);
    }
    return area;
}

/// Location and value of the interpolant minimum over [a, b]. The minimum of
/// a piecewise-linear function is attained at a sample or at an interval
/// edge; ties resolve to the earliest time.
inline std::pair<double, double> min_point(const TimeSeries& s, double a, double b) {
    if (!(a < b)) {
        throw RangeError("series \"" + s.name + "\": empty interval [" + std::to_string(a) +
                         ", " + std::to_string(b) + "]");
    }
    double best_t = a;
    double best_q = interpolate(s, a);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.times[i] > a && s.times[i] < b && s.values[i] < best_q) {
            best_t = s.times[i];
            best_q = s.values[i];
        }
    }
    double qb = interpolate(s, b);
    if (qb < best_q) {
        best_t = b;
        best_q = qb;
    }
    return {best_t, best_q};
}

}  // namespace resil

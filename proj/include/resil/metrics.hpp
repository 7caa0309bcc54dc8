#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "resil/common.hpp"
#include "resil/kernels.hpp"
#include "resil/series.hpp"

namespace resil {

/// A named derived trace over time (kernel AUC, derivatives, ...).
struct MetricSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
};

/// A named scalar metric.
struct MetricScalar {
    std::string name;
    double value = 0.0;
};

/// A maximal open interval where the interpolant sits strictly below theta.
struct ThresholdEpisode {
    double enter = 0.0;
    double exit = 0.0;

    double length() const { return exit - enter; }
};

/// Below-threshold summary over an analysis window.
struct ThresholdStats {
    double theta = 0.0;
    double time_below = 0.0;
    std::size_t episode_count = 0;
    std::vector<ThresholdEpisode> episodes;
};

/// Time-normalized area under the curve over the window: trapezoidal
/// integral of Q divided by the window length. Lies in [0, 1].
inline double auc(const TimeSeries& s, const AnalysisWindow& w) {
    TimeSeries part = slice(s, w);
    return trapezoid(part) / w.length();
}

/// AUC over the full sampled domain.
inline double auc(const TimeSeries& s) {
    return auc(s, AnalysisWindow(s.t_first(), s.t_last()));
}

/// Recency-weighted AUC trace. At each sample time t_i (i >= 1) the value
/// is sum_j w(t_i - m_j) * a_j / sum_j w(t_i - m_j) * d_j over the
/// intervals j < i, where a_j is the trapezoid area of interval j, d_j its
/// duration, and m_j its midpoint. The uniform kernel reproduces the plain
/// prefix AUC exactly.
inline MetricSeries kernel_auc_trace(const TimeSeries& s, const Kernel& kernel,
                                     const std::string& trace_name = "") {
    if (s.size() < 2) {
        throw SizeError("series \"" + s.name + "\": kernel AUC needs at least 2 samples");
    }
    MetricSeries out;
    out.name = trace_name.empty() ? s.name + ":kauc" : trace_name;
    std::size_t n = s.size();
    std::vector<double> area(n - 1), dur(n - 1), mid(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        dur[j] = s.times[j + 1] - s.times[j];
        area[j] = 0.5 * (s.values[j] + s.values[j + 1]) * dur[j];
        mid[j] = 0.5 * (s.times[j] + s.times[j + 1]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            double w = kernel.weight(s.times[i] - mid[j]);
            num += w * area[j];
            den += w * dur[j];
        }
        if (den <= 0.0) {
            throw EvaluationError("kernel \"" + kernel.name() +
                                  "\" assigns zero total weight at t = " +
                                  std::to_string(s.times[i]));
        }
        out.times.push_back(s.times[i]);
        out.values.push_back(num / den);
    }
    return out;
}

/// Maximal strictly-below-theta episodes of the interpolant over the
/// window, with crossing times found by linear interpolation. Touching
/// theta without going below does not open an episode.
inline ThresholdStats threshold_stats(const TimeSeries& s, const AnalysisWindow& w,
                                      double theta) {
    if (theta < 0.0 || theta > 1.0) {
        throw DomainError("threshold must lie in [0, 1], got " + std::to_string(theta));
    }
    TimeSeries part = slice(s, w);
    ThresholdStats stats;
    stats.theta = theta;
    bool below = part.values.front() < theta;
    double enter = below ? part.times.front() : 0.0;
    for (std::size_t i = 1; i < part.size(); ++i) {
        double v0 = part.values[i - 1];
        double v1 = part.values[i];
        if (!below && v1 < theta) {
            // Crossing into the episode; v0 >= theta > v1 on this segment.
            double f = (v0 - theta) / (v0 - v1);
            enter = part.times[i - 1] + f * (part.times[i] - part.times[i - 1]);
            below = true;
        } else if (below && v1 >= theta) {
            double f = (theta - v0) / (v1 - v0);
            double exit = part.times[i - 1] + f * (part.times[i] - part.times[i - 1]);
            stats.episodes.push_back({enter, exit});
            below = false;
        }
    }
    if (below) {
        stats.episodes.push_back({enter, part.times.back()});
    }
    for (const ThresholdEpisode& e : stats.episodes) {
        stats.time_below += e.length();
    }
    stats.episode_count = stats.episodes.size();
    return stats;
}

/// First derivative by central differences on non-uniform grids, two-point
/// one-sided at the endpoints. Exact for quadratics at interior samples.
inline MetricSeries first_derivative(const TimeSeries& s) {
    if (s.size() < 2) {
        throw SizeError("series \"" + s.name + "\": first derivative needs at least 2 samples");
    }
    MetricSeries out;
    out.name = s.name + ":dQ";
    out.times = s.times;
    std::size_t n = s.size();
    out.values.resize(n);
    out.values[0] = (s.values[1] - s.values[0]) / (s.times[1] - s.times[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = s.times[i] - s.times[i - 1];
        double hr = s.times[i + 1] - s.times[i];
        out.values[i] = (s.values[i + 1] * hl * hl - s.values[i - 1] * hr * hr +
                         s.values[i] * (hr * hr - hl * hl)) /
                        (hl * hr * (hl + hr));
    }
    out.values[n - 1] = (s.values[n - 1] - s.values[n - 2]) / (s.times[n - 1] - s.times[n - 2]);
    return out;
}

/// Second derivative by the non-uniform three-point formula at interior
/// samples, with one-sided copies at the endpoints.
inline MetricSeries second_derivative(const TimeSeries& s) {
    if (s.size() < 3) {
        throw SizeError("series \"" + s.name + "\": second derivative needs at least 3 samples");
    }
    MetricSeries out;
    out.name = s.name + ":d2Q";
    out.times = s.times;
    std::size_t n = s.size();
    out.values.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = s.times[i] - s.times[i - 1];
        double hr = s.times[i + 1] - s.times[i];
        out.values[i] = 2.0 *
                        (s.values[i - 1] * hr - s.values[i] * (hl + hr) + s.values[i + 1] * hl) /
                        (hl * hr * (hl + hr));
    }
    out.values[0] = out.values[1];
    out.values[n - 1] = out.values[n - 2];
    return out;
}

/// Both derivatives in one call; needs at least 3 samples.
inline std::pair<MetricSeries, MetricSeries> derivatives(const TimeSeries& s) {
    return {first_derivative(s), second_derivative(s)};
}

}  // namespace resil

#pragma once

#include <cmath>
#include <string>

#include "resil/common.hpp"
#include "resil/dips.hpp"
#include "resil/metrics.hpp"
#include "resil/series.hpp"

namespace resil {

/// Per-dip metric bundle. Ratio metrics that depend on a nonzero baseline
/// or an interior minimum may be undefined for degenerate dips; they are
/// reported with reasons instead of failing the analysis.
struct DipMetrics {
    double auc_d = 0.0;
    double robustness = 0.0;
    double recovery_rate = 0.0;
    double tapl = 0.0;
    MetricValue adaptive_capacity;
    MetricValue recovery_ability;
    MetricValue rapi;
    MetricValue irm;
};

/// Trapezoidal area of Q over the dip divided by the dip length.
inline double auc_d(const TimeSeries& s, const Dip& dip) {
    return auc(s, AnalysisWindow(dip.t_start, dip.t_end));
}

/// Minimum of the interpolant over the dip interval.
inline double robustness(const TimeSeries& s, const Dip& dip) {
    return min_point(s, dip.t_start, dip.t_end).second;
}

/// Reciprocal of the dip length.
inline double recovery_rate(const Dip& dip) {
    return 1.0 / dip.length();
}

/// Post-dip performance over pre-dip performance.
inline MetricValue adaptive_capacity(const Dip& dip) {
    if (dip.q_before <= 0.0) {
        return MetricValue::undefined("pre-dip performance is zero");
    }
    return MetricValue::of(dip.q_after / dip.q_before);
}

/// Recovered fraction of the deterioration: (q_after - q_min) over
/// (q_before - q_min). One means full recovery.
inline MetricValue recovery_ability(const Dip& dip) {
    if (dip.q_before <= dip.q_min) {
        return MetricValue::undefined("no deterioration during dip (q_before = q_min)");
    }
    return MetricValue::of((dip.q_after - dip.q_min) / (dip.q_before - dip.q_min));
}

/// Time-averaged performance loss: the directed area between the pre-dip
/// baseline q_before and the curve, divided by the dip length. Positive
/// below the baseline, negative when the system outperforms it.
inline double tapl(const TimeSeries& s, const Dip& dip) {
    TimeSeries part = slice(s, AnalysisWindow(dip.t_start, dip.t_end));
    double area = 0.0;
    for (std::size_t i = 1; i < part.size(); ++i) {
        double gap0 = dip.q_before - part.values[i - 1];
        double gap1 = dip.q_before - part.values[i];
        area += 0.5 * (gap0 + gap1) * (part.times[i] - part.times[i - 1]);
    }
    return area / dip.length();
}

/// Rapidity: average recovery slope magnitude over average disruption
/// slope magnitude, with phases split at t_min.
inline MetricValue rapi(const Dip& dip) {
    if (dip.t_min <= dip.t_start) {
        return MetricValue::undefined("dip minimum at interval start");
    }
    if (dip.t_min >= dip.t_end) {
        return MetricValue::undefined("dip minimum at interval end");
    }
    if (dip.q_before <= dip.q_min) {
        return MetricValue::undefined("no deterioration during dip (q_before = q_min)");
    }
    double disruption = (dip.q_min - dip.q_before) / (dip.t_min - dip.t_start);
    double recovery = (dip.q_after - dip.q_min) / (dip.t_end - dip.t_min);
    return MetricValue::of(std::fabs(recovery) / std::fabs(disruption));
}

/// Integrated resilience metric: robustness * rapi * (tapl + 1)^-1 *
/// recovery_ability. Undefined when any factor is, naming that factor.
inline MetricValue irm(const TimeSeries& s, const Dip& dip) {
    MetricValue rp = rapi(dip);
    if (!rp.defined()) {
        return MetricValue::undefined("rapi undefined: " + rp.reason());
    }
    MetricValue ra = recovery_ability(dip);
    if (!ra.defined()) {
        return MetricValue::undefined("recovery_ability undefined: " + ra.reason());
    }
    double tp = tapl(s, dip);
    if (tp + 1.0 <= 0.0) {
        return MetricValue::undefined("tapl + 1 is not positive");
    }
    return MetricValue::of(robustness(s, dip) * rp.value() * (1.0 / (tp + 1.0)) * ra.value());
}

/// Every per-dip metric in one pass.
inline DipMetrics compute_dip_metrics(const TimeSeries& s, const Dip& dip) {
    DipMetrics m;
    m.auc_d = auc_d(s, dip);
    m.robustness = robustness(s, dip);
    m.recovery_rate = recovery_rate(dip);
    m.tapl = tapl(s, dip);
    m.adaptive_capacity = adaptive_capacity(dip);
    m.recovery_ability = recovery_ability(dip);
    m.rapi = rapi(dip);
    m.irm = irm(s, dip);
    return m;
}

}  // namespace resil

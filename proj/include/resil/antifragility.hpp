#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "resil/common.hpp"

namespace resil {

enum class Classification { fragile, mixed, antifragile, not_computable };

inline const char* classification_name(Classification c) {
    switch (c) {
        case Classification::fragile: return "fragile";
        case Classification::mixed: return "mixed";
        case Classification::antifragile: return "antifragile";
        case Classification::not_computable: return "not-computable";
    }
    return "not-computable";
}

/// Antifragility degree of one per-dip metric sequence. `note` carries
/// auxiliary detail (for the mean score: which inputs were excluded).
struct AntifragilityScore {
    std::string metric_name;
    MetricValue alpha;
    std::size_t n_dips = 0;
    Classification classification = Classification::not_computable;
    std::string note;
};

namespace detail {

inline Classification classify_alpha(double a) {
    if (a == 0.0) return Classification::fragile;
    if (a < 1.0) return Classification::mixed;
    return Classification::antifragile;
}

}  // namespace detail

/// Antifragility degree alpha over an ordered per-dip metric sequence
/// u_1..u_n, with differences D_i = u_{i+1} - u_i:
///   n < 2                 -> not computable;
///   all D_i < 0           -> alpha = 0 (fragile);
///   all D_i >= 0          -> alpha = 1 + mean(D_i / u_i) (antifragile);
///                            a strict improvement from u_i = 0 is not
///                            computable, a zero change from zero adds 0;
///   mixed signs           -> alpha = n_up / (n_up + n_down), D_i = 0
///                            counting upward (mixed).
inline AntifragilityScore alpha(const std::vector<double>& values,
                                const std::string& metric_name = "") {
    AntifragilityScore score;
    score.metric_name = metric_name;
    score.n_dips = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw DomainError("alpha input at index " + std::to_string(i) +
                              " is negative or non-finite");
        }
    }
    if (values.size() < 2) {
        score.alpha = MetricValue::undefined("needs at least 2 per-dip values, got " +
                                             std::to_string(values.size()));
        score.classification = Classification::not_computable;
        return score;
    }
    std::size_t n_up = 0;
    std::size_t n_down = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1] - values[i] < 0.0) {
            ++n_down;
        } else {
            ++n_up;
        }
    }
    if (n_up == 0) {
        score.alpha = MetricValue::of(0.0);
        score.classification = Classification::fragile;
        return score;
    }
    if (n_down == 0) {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            double delta = values[i + 1] - values[i];
            if (values[i] == 0.0) {
                if (delta > 0.0) {
                    score.alpha = MetricValue::undefined("improvement from zero at index " +
                                                         std::to_string(i));
                    score.classification = Classification::not_computable;
                    return score;
                }
                continue;  // zero change from zero contributes rate 0
            }
            sum += delta / values[i];
        }
        double a = 1.0 + sum / static_cast<double>(values.size() - 1);
        score.alpha = MetricValue::of(a);
        score.classification = detail::classify_alpha(a);
        return score;
    }
    double a = static_cast<double>(n_up) / static_cast<double>(n_up + n_down);
    score.alpha = MetricValue::of(a);
    score.classification = detail::classify_alpha(a);
    return score;
}

/// Mean antifragility over per-metric scores of one system. Not-computable
/// inputs are excluded and listed; a mean over nothing is not computable.
inline AntifragilityScore mean_alpha(const std::vector<AntifragilityScore>& scores) {
    if (scores.empty()) {
        throw SizeError("mean alpha needs at least one per-metric score");
    }
    std::set<std::string> names;
    for (const AntifragilityScore& s : scores) {
        if (!names.insert(s.metric_name).second) {
            throw ValidationError("duplicate metric name \"" + s.metric_name +
                                  "\" in mean alpha input");
        }
    }
    AntifragilityScore mean;
    mean.metric_name = "mean";
    double sum = 0.0;
    std::size_t count = 0;
    std::string excluded;
    for (const AntifragilityScore& s : scores) {
        if (s.alpha.defined()) {
            sum += s.alpha.value();
            ++count;
            if (mean.n_dips == 0) mean.n_dips = s.n_dips;
        } else {
            if (!excluded.empty()) excluded += "; ";
            excluded += s.metric_name + " (" + s.alpha.reason() + ")";
        }
    }
    if (count == 0) {
        mean.n_dips = scores.front().n_dips;
        mean.alpha = MetricValue::undefined("no computable alphas: " + excluded);
        mean.classification = Classification::not_computable;
        return mean;
    }
    double a = sum / static_cast<double>(count);
    mean.alpha = MetricValue::of(a);
    mean.classification = detail::classify_alpha(a);
    if (!excluded.empty()) {
        mean.note = "excluded: " + excluded;
    }
    return mean;
}

}  // namespace resil

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "resil/common.hpp"
#include "resil/ingest.hpp"
#include "resil/series.hpp"

namespace resil {

/// Parameters for the built-in test-signal generator. `points` of 0 means
/// the shape's natural sample count. `length` applies to shape "v" only;
/// the other shapes use unit sample spacing.
struct FixtureSpec {
    std::string shape = "v";  // v | trapezoid | multi-dip | noisy
    double depth = 0.5;
    double length = 2.0;
    std::size_t dips = 3;
    std::size_t points = 0;
    double noise = 0.05;
    std::uint64_t seed = 0;
    std::string name;
};

namespace detail {

/// Deterministic uniform double in [-1, 1); fixed mapping from the engine's
/// bit stream so all platforms generate identical fixtures.
inline double signed_unit(std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
}

inline TimeSeries v_shape(const FixtureSpec& spec) {
    TimeSeries s;
    s.times = {0.0, spec.length / 2.0, spec.length};
    s.values = {1.0, 1.0 - spec.depth, 1.0};
    return s;
}

/// Steady, linear decline, linear recovery, steady: four exact line pieces
/// meeting at shared samples, so a 4-segment fit has zero error.
inline TimeSeries trapezoid_shape(const FixtureSpec& spec) {
    std::size_t p = 8;
    if (spec.points > 0) {
        if (spec.points < 9) {
            throw ConfigError("trapezoid fixture needs at least 9 points, got " +
                              std::to_string(spec.points));
        }
        p = (spec.points - 1) / 4;
    }
    TimeSeries s;
    for (std::size_t i = 0; i <= 4 * p; ++i) {
        double t = static_cast<double>(i);
        double q;
        if (i <= p) {
            q = 1.0;
        } else if (i <= 2 * p) {
            q = 1.0 - spec.depth * static_cast<double>(i - p) / static_cast<double>(p);
        } else if (i <= 3 * p) {
            q = 1.0 - spec.depth * static_cast<double>(3 * p - i) / static_cast<double>(p);
        } else {
            q = 1.0;
        }
        s.times.push_back(t);
        s.values.push_back(q);
    }
    return s;
}

/// Sawtooth of `dips` V-shaped excursions with strictly decreasing depth,
/// peaks back at 1.0 between them.
inline TimeSeries multi_dip_shape(const FixtureSpec& spec) {
    std::size_t c = spec.dips;
    std::size_t p = 1;  // samples per half-excursion
    if (spec.points > 0) {
        if (spec.points < 2 * c + 1) {
            throw ConfigError("multi-dip fixture with " + std::to_string(c) +
                              " dips needs at least " + std::to_string(2 * c + 1) +
                              " points, got " + std::to_string(spec.points));
        }
        p = (spec.points - 1) / (2 * c);
    }
    TimeSeries s;
    for (std::size_t i = 0; i <= 2 * c * p; ++i) {
        std::size_t cycle = i / (2 * p);
        std::size_t phase = i % (2 * p);
        double d = spec.depth;
        if (c > 1) {
            d = spec.depth * (1.0 - 0.5 * static_cast<double>(std::min(cycle, c - 1)) /
                                        static_cast<double>(c - 1));
        }
        double frac;  // distance from the cycle's valley, in [0, 1]
        if (phase <= p) {
            frac = 1.0 - static_cast<double>(phase) / static_cast<double>(p);
        } else {
            frac = static_cast<double>(phase - p) / static_cast<double>(p);
        }
        s.times.push_back(static_cast<double>(i));
        s.values.push_back(1.0 - d * (1.0 - frac));
    }
    return s;
}

/// Smooth baseline with `dips` separated cosine-squared wells of decreasing
/// depth, plus seeded uniform noise, clamped to [0, 1].
inline TimeSeries noisy_shape(const FixtureSpec& spec) {
    std::size_t n = spec.points > 0 ? spec.points : 136;
    if (n < 2) {
        throw ConfigError("noisy fixture needs at least 2 points, got " + std::to_string(n));
    }
    std::size_t c = spec.dips;
    double w = 0.35 / static_cast<double>(c);
    std::mt19937_64 rng(spec.seed);
    TimeSeries s;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(n - 1);
        double q = 1.0;
        for (std::size_t k = 0; k < c; ++k) {
            double center = (static_cast<double>(k) + 0.5) / static_cast<double>(c);
            double d = spec.depth;
            if (c > 1) {
                d = spec.depth *
                    (1.0 - 0.5 * static_cast<double>(k) / static_cast<double>(c - 1));
            }
            double u = std::fabs(x - center);
            if (u < w) {
                double cosv = std::cos(0.5 * 3.14159265358979323846 * u / w);
                q -= d * cosv * cosv;
            }
        }
        q += spec.noise * signed_unit(rng);
        s.times.push_back(static_cast<double>(i));
        s.values.push_back(std::clamp(q, 0.0, 1.0));
    }
    return s;
}

}  // namespace detail

/// Generates one deterministic series for the requested shape. Identical
/// specs produce identical output on every platform.
inline SeriesBundle generate_fixture(const FixtureSpec& spec) {
    if (!(spec.depth > 0.0) || spec.depth > 1.0 || !std::isfinite(spec.depth)) {
        throw ConfigError("fixture depth must be in (0, 1]");
    }
    if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
        throw ConfigError("fixture length must be positive");
    }
    if (spec.dips < 1) {
        throw ConfigError("fixture dip count must be at least 1");
    }
    if (spec.noise < 0.0 || spec.noise > 0.5 || !std::isfinite(spec.noise)) {
        throw ConfigError("fixture noise must be in [0, 0.5]");
    }

    TimeSeries s;
    if (spec.shape == "v") {
        s = detail::v_shape(spec);
    } else if (spec.shape == "trapezoid") {
        s = detail::trapezoid_shape(spec);
    } else if (spec.shape == "multi-dip") {
        s = detail::multi_dip_shape(spec);
    } else if (spec.shape == "noisy") {
        s = detail::noisy_shape(spec);
    } else {
        throw ConfigError("unknown fixture shape \"" + spec.shape +
                          "\" (expected v, trapezoid, multi-dip, or noisy)");
    }
    s.name = spec.name.empty() ? spec.shape : spec.name;
    s.validate();

    SeriesBundle bundle;
    bundle.series.push_back(std::move(s));
    bundle.source.path = "";
    bundle.source.format = "native";
    return bundle;
}

}  // namespace resil

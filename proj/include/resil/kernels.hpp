#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "resil/common.hpp"

namespace resil {

/// A non-increasing weight over sample age used for recency-weighted AUC.
/// Built-in kinds: uniform (weight 1), exponential decay with a user-set
/// half life (weight halves every half_life time units), and inverse
/// weighting 1 / (1 + age / scale). Custom kernels are supplied
/// programmatically; the CLI only exposes the built-in kinds.
class Kernel {
public:
    enum class Kind { uniform, exponential, inverse, custom };

    static Kernel uniform() { return Kernel(Kind::uniform, "uniform"); }

    static Kernel exponential(double half_life) {
        if (!(half_life > 0.0) || !std::isfinite(half_life)) {
            throw DomainError("exponential kernel needs half_life > 0, got " +
                              std::to_string(half_life));
        }
        Kernel k(Kind::exponential, "exponential");
        k.half_life_ = half_life;
        return k;
    }

    static Kernel inverse(double scale) {
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw DomainError("inverse kernel needs scale > 0, got " + std::to_string(scale));
        }
        Kernel k(Kind::inverse, "inverse");
        k.scale_ = scale;
        return k;
    }

    static Kernel custom(std::string name, std::function<double(double)> weight) {
        if (!weight) {
            throw DomainError("custom kernel needs a weight function");
        }
        Kernel k(Kind::custom, std::move(name));
        k.fn_ = std::move(weight);
        return k;
    }

    /// Weight of a sample `age` time units in the past. Requires age >= 0.
    double weight(double age) const {
        switch (kind_) {
            case Kind::uniform:
                return 1.0;
            case Kind::exponential:
                return std::exp2(-age / half_life_);
            case Kind::inverse:
                return 1.0 / (1.0 + age / scale_);
            case Kind::custom: {
                double w = fn_(age);
                if (!std::isfinite(w) || w < 0.0) {
                    throw EvaluationError("custom kernel \"" + name_ +
                                          "\" produced an invalid weight at age " +
                                          std::to_string(age));
                }
                return w;
            }
        }
        return 1.0;
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double half_life() const { return half_life_; }
    double scale() const { return scale_; }

private:
    Kernel(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    double half_life_ = 0.0;
    double scale_ = 0.0;
    std::function<double(double)> fn_;
};

}  // namespace resil

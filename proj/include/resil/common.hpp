#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace resil {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A time or index lies outside the usable domain.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Input data violates a declared invariant (ordering, bounds, lengths).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A document is not syntactically valid JSON.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A document parses but does not match any supported schema.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Too few samples to fit the requested number of segments.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// An operation needs more samples than the series provides.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computation could not be carried out (e.g. all kernel weights vanish).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// The run configuration is inconsistent or incomplete.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A metric outcome that may be undefined for a particular dip. Undefined
/// values carry a human-readable reason and serialize as null in reports;
/// they are values, not errors, so analysis of the remaining dips proceeds.
class MetricValue {
public:
    MetricValue() : reason_("not computed") {}

    static MetricValue of(double v) {
        MetricValue m;
        m.value_ = v;
        m.reason_.clear();
        return m;
    }

    static MetricValue undefined(std::string reason) {
        MetricValue m;
        m.reason_ = std::move(reason);
        return m;
    }

    bool defined() const { return value_.has_value(); }

    double value() const {
        if (!value_) {
            throw std::logic_error("MetricValue::value() on undefined metric: " + reason_);
        }
        return *value_;
    }

    const std::string& reason() const { return reason_; }

private:
    std::optional<double> value_;
    std::string reason_;
};

}  // namespace resil

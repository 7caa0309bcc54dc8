#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "resil/common.hpp"
#include "resil/series.hpp"

namespace resil {

enum class InputFormat { native, figure, auto_detect };

inline const char* input_format_name(InputFormat f) {
    switch (f) {
        case InputFormat::native: return "native";
        case InputFormat::figure: return "figure";
        case InputFormat::auto_detect: return "auto";
    }
    return "auto";
}

/// Where a bundle came from.
struct SourceInfo {
    std::string path;
    std::string format;
};

/// One or more named series under joint analysis, plus an optional
/// document-level analysis window and non-fatal parse warnings.
struct SeriesBundle {
    std::vector<TimeSeries> series;
    SourceInfo source;
    std::optional<AnalysisWindow> window;
    std::vector<std::string> warnings;
};

namespace detail {

inline nlohmann::json parse_json_document(std::string_view doc) {
    try {
        return nlohmann::json::parse(doc);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("parse error: ") + e.what());
    }
}

inline std::vector<double> number_array(const nlohmann::json& node, const std::string& where) {
    if (!node.is_array()) {
        throw ValidationError(where + " is not an array");
    }
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number()) {
            throw ValidationError(where + " has a non-numeric entry at index " +
                                  std::to_string(i));
        }
        out.push_back(node[i].get<double>());
    }
    return out;
}

inline void check_bundle(const SeriesBundle& bundle) {
    if (bundle.series.empty()) {
        throw ValidationError("document contains no series");
    }
    std::set<std::string> names;
    for (const TimeSeries& s : bundle.series) {
        if (!names.insert(s.name).second) {
            throw ValidationError("duplicate series name \"" + s.name + "\"");
        }
    }
}

}  // namespace detail

/// Parses the native schema:
///   {"series":[{"name":...,"t":[...],"q":[...]}...],"window":{"t0":...,"t1":...}?}
/// Extra keys are ignored. Every returned series satisfies all TimeSeries
/// invariants.
inline SeriesBundle parse_native_json(std::string_view doc) {
    nlohmann::json root = detail::parse_json_document(doc);
    if (!root.is_object() || !root.contains("series") || !root["series"].is_array()) {
        throw FormatError("native document needs a top-level \"series\" array");
    }
    SeriesBundle bundle;
    bundle.source.format = "native";
    const nlohmann::json& entries = root["series"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const nlohmann::json& entry = entries[i];
        std::string where = "series entry " + std::to_string(i);
        if (!entry.is_object()) {
            throw ValidationError(where + " is not an object");
        }
        if (!entry.contains("name") || !entry["name"].is_string()) {
            throw ValidationError(where + " is missing a string \"name\"");
        }
        TimeSeries s;
        s.name = entry["name"].get<std::string>();
        if (!entry.contains("t") || !entry.contains("q")) {
            throw ValidationError(where + " (\"" + s.name + "\") needs \"t\" and \"q\" arrays");
        }
        s.times = detail::number_array(entry["t"], where + " \"t\"");
        s.values = detail::number_array(entry["q"], where + " \"q\"");
        s.validate();
        bundle.series.push_back(std::move(s));
    }
    if (root.contains("window")) {
        const nlohmann::json& w = root["window"];
        if (!w.is_object() || !w.contains("t0") || !w.contains("t1") ||
            !w["t0"].is_number() || !w["t1"].is_number()) {
            throw ValidationError("\"window\" needs numeric \"t0\" and \"t1\"");
        }
        bundle.window.emplace(w["t0"].get<double>(), w["t1"].get<double>());
    }
    detail::check_bundle(bundle);
    return bundle;
}

/// Parses a figure document: top-level "data" array of traces with "x",
/// "y", and optional "name". Traces lacking both x and y are skipped with
/// a warning; unnamed traces get "trace-<data index>". Layout and styling
/// keys are ignored.
inline SeriesBundle parse_figure_json(std::string_view doc) {
    nlohmann::json root = detail::parse_json_document(doc);
    if (!root.is_object() || !root.contains("data") || !root["data"].is_array()) {
        throw FormatError("figure document needs a top-level \"data\" array");
    }
    SeriesBundle bundle;
    bundle.source.format = "figure";
    const nlohmann::json& traces = root["data"];
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const nlohmann::json& trace = traces[i];
        std::string where = "trace " + std::to_string(i);
        bool has_x = trace.is_object() && trace.contains("x");
        bool has_y = trace.is_object() && trace.contains("y");
        if (!has_x && !has_y) {
            bundle.warnings.push_back(where + " skipped (no x/y arrays)");
            continue;
        }
        if (!has_x || !has_y) {
            throw ValidationError(where + " has only one of \"x\" and \"y\"");
        }
        TimeSeries s;
        if (trace.contains("name")) {
            if (!trace["name"].is_string()) {
                throw ValidationError(where + " \"name\" is not a string");
            }
            s.name = trace["name"].get<std::string>();
        } else {
            s.name = "trace-" + std::to_string(i);
        }
        s.times = detail::number_array(trace["x"], where + " \"x\"");
        s.values = detail::number_array(trace["y"], where + " \"y\"");
        s.validate();
        bundle.series.push_back(std::move(s));
    }
    detail::check_bundle(bundle);
    return bundle;
}

/// Reads a file and dispatches on format; auto tries the native schema
/// first, then the figure schema, and reports both failures when neither
/// fits.
inline SeriesBundle load(const std::string& path, InputFormat format = InputFormat::auto_detect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read file \"" + path + "\"");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed for file \"" + path + "\"");
    }
    std::string doc = buf.str();
    SeriesBundle bundle;
    switch (format) {
        case InputFormat::native:
            bundle = parse_native_json(doc);
            break;
        case InputFormat::figure:
            bundle = parse_figure_json(doc);
            break;
        case InputFormat::auto_detect:
            try {
                bundle = parse_native_json(doc);
            } catch (const Error& native_err) {
                try {
                    bundle = parse_figure_json(doc);
                } catch (const Error& figure_err) {
                    throw FormatError(std::string("auto-detect failed: native: ") +
                                      native_err.what() + "; figure: " + figure_err.what());
                }
            }
            break;
    }
    bundle.source.path = path;
    return bundle;
}

/// Canonical native-schema serialization. Numbers print in shortest
/// round-trip form, so parse(serialize(bundle)) reproduces timestamps and
/// values bit-equal and serialize(parse(doc)) is byte-identical on
/// canonical documents.
inline std::string serialize_native(const SeriesBundle& bundle) {
    nlohmann::ordered_json root;
    root["series"] = nlohmann::ordered_json::array();
    for (const TimeSeries& s : bundle.series) {
        nlohmann::ordered_json entry;
        entry["name"] = s.name;
        entry["t"] = s.times;
        entry["q"] = s.values;
        root["series"].push_back(std::move(entry));
    }
    if (bundle.window) {
        root["window"] = {{"t0", bundle.window->t0}, {"t1", bundle.window->t1}};
    }
    return root.dump();
}

}  // namespace resil

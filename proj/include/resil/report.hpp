#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "resil/antifragility.hpp"
#include "resil/common.hpp"
#include "resil/dip_metrics.hpp"
#include "resil/dips.hpp"
#include "resil/ingest.hpp"
#include "resil/kernels.hpp"
#include "resil/metrics.hpp"
#include "resil/series.hpp"

namespace resil {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

/// Dip list for one series, with the convention that produced it.
struct SeriesDips {
    std::string series;
    DipMode mode = DipMode::max;
    std::vector<Dip> items;
    double slope_tol = -1.0;    // resolved tolerance (linreg mode only, else < 0)
    std::size_t segments = 0;   // selected segment count (linreg mode only)
};

/// Per-dip metric bundles for one series, aligned with SeriesDips.items.
struct SeriesDipMetrics {
    std::string series;
    std::vector<DipMetrics> per_dip;
};

/// Antifragility scores for one series plus their mean.
struct SeriesAntifragility {
    std::string series;
    std::vector<AntifragilityScore> scores;
    AntifragilityScore mean;
};

/// Raw sample count and effective analysis window of one input series.
struct SeriesInput {
    std::string name;
    std::size_t samples = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Which filters ran, with their parameters and outcomes.
struct PreprocessInfo {
    std::optional<double> value_update_delta;
    bool smoothing = false;
    std::size_t max_segments = 12;
    std::vector<std::pair<std::string, std::size_t>> smoothed_segments;
};

/// Everything one run computed, in one serializable value. JSON and HTML
/// are both generated from this, so they can never disagree.
struct AnalysisReport {
    std::string tool_version = kToolVersion;
    std::string schema_version = kSchemaVersion;
    std::string timestamp;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    SourceInfo source;
    std::vector<SeriesInput> inputs;
    PreprocessInfo preprocessing;
    std::vector<TimeSeries> series;  // as analyzed (windowed, filtered)
    std::vector<SeriesDips> dips;
    std::vector<MetricScalar> auc_values;
    std::optional<Kernel> kernel;
    std::vector<MetricSeries> kernel_traces;
    std::optional<double> theta;
    std::vector<std::pair<std::string, ThresholdStats>> threshold;
    std::vector<std::pair<MetricSeries, MetricSeries>> derivative_traces;
    std::vector<std::string> dip_metric_selection;  // canonical order, resolved
    std::vector<SeriesDipMetrics> dip_metrics;
    std::vector<SeriesAntifragility> antifragility;
    std::vector<std::string> warnings;
    bool emit_timings = false;
    std::vector<std::pair<std::string, double>> timings_ms;
};

namespace detail {

inline std::string fmt_general(double v, int digits) {
    if (!std::isfinite(v)) {
        throw std::logic_error("non-finite number reached the serializer");
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

/// 12 significant digits; the report's number format.
inline std::string fmt_sig12(double v) { return fmt_general(v, 12); }

/// Fixed decimal places; used for HTML annotations and SVG coordinates.
inline std::string fmt_fixed(double v, int places) {
    if (!std::isfinite(v)) {
        throw std::logic_error("non-finite number reached the serializer");
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, places);
    return std::string(buf, res.ptr);
}

inline std::string json_quote(const std::string& s) {
    return nlohmann::ordered_json(s).dump();
}

inline void dump_node(const nlohmann::ordered_json& j, std::string& out) {
    using value_t = nlohmann::detail::value_t;
    switch (j.type()) {
        case value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& item : j.items()) {
                if (!first) out += ',';
                first = false;
                out += json_quote(item.key());
                out += ':';
                dump_node(item.value(), out);
            }
            out += '}';
            break;
        }
        case value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_node(j[i], out);
            }
            out += ']';
            break;
        }
        case value_t::string:
            out += json_quote(j.get_ref<const std::string&>());
            break;
        case value_t::null:
            out += "null";
            break;
        case value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case value_t::number_float:
            out += fmt_sig12(j.get<double>());
            break;
        default:
            throw std::logic_error("unexpected JSON node type");
    }
}

/// Canonical order of per-dip metric tokens in reports and annotations.
inline const std::vector<std::string>& dip_metric_token_order() {
    static const std::vector<std::string> order{"aucd", "r",    "rr",   "ac",
                                                "ra",   "tapl", "rapi", "irm"};
    return order;
}

inline std::string dip_metric_label(const std::string& token) {
    std::string label = token;
    for (char& c : label) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return label;
}

inline MetricValue dip_metric_value(const DipMetrics& m, const std::string& token) {
    if (token == "aucd") return MetricValue::of(m.auc_d);
    if (token == "r") return MetricValue::of(m.robustness);
    if (token == "rr") return MetricValue::of(m.recovery_rate);
    if (token == "ac") return m.adaptive_capacity;
    if (token == "ra") return m.recovery_ability;
    if (token == "tapl") return MetricValue::of(m.tapl);
    if (token == "rapi") return m.rapi;
    if (token == "irm") return m.irm;
    throw std::logic_error("unknown dip metric token \"" + token + "\"");
}

inline nlohmann::ordered_json metric_series_json(const MetricSeries& t) {
    nlohmann::ordered_json node;
    node["t"] = t.times;
    node["value"] = t.values;
    return node;
}

}  // namespace detail

/// Deterministic JSON serialization: stable key order, floats at 12
/// significant digits, undefined metrics as null plus a reason.
inline std::string to_json(const AnalysisReport& r) {
    using json = nlohmann::ordered_json;
    json root;
    root["schema_version"] = r.schema_version;
    root["tool_version"] = r.tool_version;
    root["timestamp"] = r.timestamp;
    root["config"] = r.config;

    json inputs;
    inputs["source"] = {{"path", r.source.path}, {"format", r.source.format}};
    inputs["series"] = json::array();
    for (const SeriesInput& si : r.inputs) {
        json node;
        node["name"] = si.name;
        node["samples"] = si.samples;
        node["window"] = {{"t0", si.t0}, {"t1", si.t1}};
        inputs["series"].push_back(std::move(node));
    }
    root["inputs"] = std::move(inputs);

    json prep;
    prep["value_update_delta"] =
        r.preprocessing.value_update_delta ? json(*r.preprocessing.value_update_delta) : json();
    if (r.preprocessing.smoothing) {
        json sm;
        sm["max_segments"] = r.preprocessing.max_segments;
        sm["selected"] = json::array();
        for (const auto& [name, segs] : r.preprocessing.smoothed_segments) {
            sm["selected"].push_back({{"series", name}, {"segments", segs}});
        }
        prep["smoothing"] = std::move(sm);
    } else {
        prep["smoothing"] = false;
    }
    root["preprocessing"] = std::move(prep);

    root["dips"] = json::array();
    for (const SeriesDips& sd : r.dips) {
        json node;
        node["series"] = sd.series;
        node["mode"] = dip_mode_name(sd.mode);
        node["settling_convention"] = settling_convention(sd.mode);
        if (sd.mode == DipMode::linreg) {
            node["slope_tol"] = sd.slope_tol;
            node["segments"] = sd.segments;
        }
        node["items"] = json::array();
        for (const Dip& d : sd.items) {
            node["items"].push_back({{"t_start", d.t_start},
                                     {"t_end", d.t_end},
                                     {"t_min", d.t_min},
                                     {"q_before", d.q_before},
                                     {"q_after", d.q_after},
                                     {"q_min", d.q_min}});
        }
        root["dips"].push_back(std::move(node));
    }

    json metrics = json::object();
    if (!r.auc_values.empty()) {
        metrics["auc"] = json::array();
        for (const MetricScalar& m : r.auc_values) {
            metrics["auc"].push_back({{"series", m.name}, {"value", m.value}});
        }
    }
    if (r.kernel) {
        json node;
        json kcfg;
        kcfg["kind"] = r.kernel->name();
        if (r.kernel->kind() == Kernel::Kind::exponential) {
            kcfg["half_life"] = r.kernel->half_life();
        }
        if (r.kernel->kind() == Kernel::Kind::inverse) {
            kcfg["scale"] = r.kernel->scale();
        }
        node["kernel"] = std::move(kcfg);
        node["traces"] = json::array();
        for (const MetricSeries& t : r.kernel_traces) {
            json tr = detail::metric_series_json(t);
            json entry;
            entry["name"] = t.name;
            entry["t"] = std::move(tr["t"]);
            entry["value"] = std::move(tr["value"]);
            node["traces"].push_back(std::move(entry));
        }
        metrics["kernel_auc"] = std::move(node);
    }
    if (r.theta) {
        json node;
        node["theta"] = *r.theta;
        node["stats"] = json::array();
        for (const auto& [name, stats] : r.threshold) {
            json entry;
            entry["series"] = name;
            entry["time_below"] = stats.time_below;
            entry["episode_count"] = stats.episode_count;
            entry["episodes"] = json::array();
            for (const ThresholdEpisode& e : stats.episodes) {
                entry["episodes"].push_back({{"enter", e.enter}, {"exit", e.exit}});
            }
            node["stats"].push_back(std::move(entry));
        }
        metrics["threshold"] = std::move(node);
    }
    if (!r.derivative_traces.empty()) {
        metrics["derivatives"] = json::array();
        for (std::size_t i = 0; i < r.derivative_traces.size(); ++i) {
            const auto& [d1, d2] = r.derivative_traces[i];
            json entry;
            entry["series"] = r.series[i].name;
            entry["first"] = detail::metric_series_json(d1);
            entry["second"] = detail::metric_series_json(d2);
            metrics["derivatives"].push_back(std::move(entry));
        }
    }
    if (!r.dip_metric_selection.empty() && !r.dip_metrics.empty()) {
        metrics["per_dip"] = json::array();
        for (const SeriesDipMetrics& sm : r.dip_metrics) {
            json entry;
            entry["series"] = sm.series;
            entry["dips"] = json::array();
            for (std::size_t i = 0; i < sm.per_dip.size(); ++i) {
                json dnode;
                dnode["index"] = i;
                json values = json::object();
                json reasons = json::object();
                for (const std::string& token : r.dip_metric_selection) {
                    MetricValue v = detail::dip_metric_value(sm.per_dip[i], token);
                    if (v.defined()) {
                        values[token] = v.value();
                    } else {
                        values[token] = nullptr;
                        reasons[token] = v.reason();
                    }
                }
                dnode["values"] = std::move(values);
                if (!reasons.empty()) {
                    dnode["reasons"] = std::move(reasons);
                }
                entry["dips"].push_back(std::move(dnode));
            }
            metrics["per_dip"].push_back(std::move(entry));
        }
    }
    root["metrics"] = std::move(metrics);

    root["antifragility"] = json::array();
    for (const SeriesAntifragility& sa : r.antifragility) {
        json node;
        node["series"] = sa.series;
        node["scores"] = json::array();
        for (const AntifragilityScore& sc : sa.scores) {
            json entry;
            entry["metric"] = sc.metric_name;
            if (sc.alpha.defined()) {
                entry["alpha"] = sc.alpha.value();
            } else {
                entry["alpha"] = nullptr;
                entry["reason"] = sc.alpha.reason();
            }
            entry["n_dips"] = sc.n_dips;
            entry["classification"] = classification_name(sc.classification);
            node["scores"].push_back(std::move(entry));
        }
        json mean;
        if (sa.mean.alpha.defined()) {
            mean["alpha"] = sa.mean.alpha.value();
            if (!sa.mean.note.empty()) {
                mean["reason"] = sa.mean.note;
            }
        } else {
            mean["alpha"] = nullptr;
            mean["reason"] = sa.mean.alpha.reason();
        }
        mean["classification"] = classification_name(sa.mean.classification);
        node["mean"] = std::move(mean);
        root["antifragility"].push_back(std::move(node));
    }

    root["warnings"] = r.warnings;
    if (r.emit_timings) {
        json t = json::object();
        for (const auto& [stage, ms] : r.timings_ms) {
            t[stage] = ms;
        }
        root["timings_ms"] = std::move(t);
    }

    std::string out;
    detail::dump_node(root, out);
    out += '\n';
    return out;
}

/// Figure-schema serialization of the analyzed series plus computed overlay
/// traces. Numbers use shortest round-trip form, so parsing the output
/// reproduces the series values bit-equal. Derivative overlays can leave
/// [0, 1]; a document containing such traces plots fine but is rejected by
/// figure ingestion, which enforces the normalization contract.
inline std::string emit_figure_json(const AnalysisReport& r) {
    nlohmann::ordered_json root;
    root["data"] = nlohmann::ordered_json::array();
    auto add_trace = [&root](const std::string& name, const std::vector<double>& x,
                             const std::vector<double>& y) {
        nlohmann::ordered_json node;
        node["name"] = name;
        node["x"] = x;
        node["y"] = y;
        root["data"].push_back(std::move(node));
    };
    for (const TimeSeries& s : r.series) {
        add_trace(s.name, s.times, s.values);
    }
    for (const MetricSeries& t : r.kernel_traces) {
        add_trace(t.name, t.times, t.values);
    }
    for (const auto& [d1, d2] : r.derivative_traces) {
        add_trace(d1.name, d1.times, d1.values);
        add_trace(d2.name, d2.times, d2.values);
    }
    return root.dump();
}

namespace detail {

inline std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % 10];
}

/// Round tick positions covering [lo, hi] with roughly `target` steps.
inline std::vector<double> nice_ticks(double lo, double hi, int target) {
    double span = hi - lo;
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 5.0 ? 5.0 : 10.0) * mag;
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + step * 1e-9; t += step) {
        double v = std::fabs(t) < step * 1e-9 ? 0.0 : t;
        ticks.push_back(v);
    }
    return ticks;
}

inline std::string px(double v) { return fmt_fixed(v, 2); }

inline std::string annotation_text(const DipMetrics& m,
                                   const std::vector<std::string>& tokens) {
    std::string out = "(";
    bool first = true;
    for (const std::string& token : tokens) {
        if (!first) out += ", ";
        first = false;
        MetricValue v = dip_metric_value(m, token);
        out += dip_metric_label(token) + "=";
        out += v.defined() ? fmt_fixed(v.value(), 4) : "n/a";
    }
    out += ")";
    return out;
}

struct ChartScale {
    double x_min, x_max, y_min, y_max;
    double left, right, top, bottom;

    double sx(double t) const {
        return left + (t - x_min) / (x_max - x_min) * (right - left);
    }
    double sy(double v) const {
        return bottom - (v - y_min) / (y_max - y_min) * (bottom - top);
    }
};

inline void render_axes(std::string& svg, const ChartScale& sc, int x_digits) {
    for (double t : nice_ticks(sc.x_min, sc.x_max, 6)) {
        std::string x = px(sc.sx(t));
        svg += "<line x1=\"" + x + "\" y1=\"" + px(sc.top) + "\" x2=\"" + x + "\" y2=\"" +
               px(sc.bottom) + "\" class=\"grid\"/>";
        svg += "<text x=\"" + x + "\" y=\"" + px(sc.bottom + 16) +
               "\" class=\"tick\" text-anchor=\"middle\">" + fmt_general(t, x_digits) +
               "</text>\n";
    }
    for (double v : nice_ticks(sc.y_min, sc.y_max, 5)) {
        std::string y = px(sc.sy(v));
        svg += "<line x1=\"" + px(sc.left) + "\" y1=\"" + y + "\" x2=\"" + px(sc.right) +
               "\" y2=\"" + y + "\" class=\"grid\"/>";
        svg += "<text x=\"" + px(sc.left - 6) + "\" y=\"" + y +
               "\" class=\"tick\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
               fmt_general(v, 6) + "</text>\n";
    }
    svg += "<rect x=\"" + px(sc.left) + "\" y=\"" + px(sc.top) + "\" width=\"" +
           px(sc.right - sc.left) + "\" height=\"" + px(sc.bottom - sc.top) +
           "\" class=\"frame\"/>\n";
}

inline std::string polyline(const ChartScale& sc, const std::vector<double>& ts,
                            const std::vector<double>& vs, const std::string& attrs) {
    std::string out = "<polyline fill=\"none\" " + attrs + " points=\"";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) out += ' ';
        out += px(sc.sx(ts[i])) + "," + px(sc.sy(vs[i]));
    }
    out += "\"/>\n";
    return out;
}

inline std::string render_main_chart(const AnalysisReport& r) {
    ChartScale sc;
    sc.x_min = r.series.front().t_first();
    sc.x_max = r.series.front().t_last();
    for (const TimeSeries& s : r.series) {
        sc.x_min = std::min(sc.x_min, s.t_first());
        sc.x_max = std::max(sc.x_max, s.t_last());
    }
    sc.y_min = 0.0;
    sc.y_max = 1.0;
    for (const auto& [d1, d2] : r.derivative_traces) {
        for (double v : d1.values) {
            sc.y_min = std::min(sc.y_min, v);
            sc.y_max = std::max(sc.y_max, v);
        }
        for (double v : d2.values) {
            sc.y_min = std::min(sc.y_min, v);
            sc.y_max = std::max(sc.y_max, v);
        }
    }
    double pad = 0.05 * (sc.y_max - sc.y_min);
    sc.y_min -= pad;
    sc.y_max += pad;
    sc.left = 55;
    sc.right = 885;
    sc.top = 15;
    sc.bottom = 345;

    std::string svg = "<svg class=\"chart\" viewBox=\"0 0 900 380\" role=\"img\">\n";
    render_axes(svg, sc, 6);

    for (const SeriesDips& sd : r.dips) {
        std::size_t color_i = 0;
        for (std::size_t i = 0; i < r.series.size(); ++i) {
            if (r.series[i].name == sd.series) color_i = i;
        }
        for (std::size_t i = 0; i < sd.items.size(); ++i) {
            const Dip& d = sd.items[i];
            svg += "<rect x=\"" + px(sc.sx(d.t_start)) + "\" y=\"" + px(sc.top) +
                   "\" width=\"" + px(sc.sx(d.t_end) - sc.sx(d.t_start)) + "\" height=\"" +
                   px(sc.bottom - sc.top) + "\" fill=\"" + series_color(color_i) +
                   "\" fill-opacity=\"0.12\" data-dip=\"" + html_escape(sd.series) + ":" +
                   std::to_string(i) + "\"/>\n";
        }
    }

    if (r.theta) {
        std::string y = px(sc.sy(*r.theta));
        svg += "<line x1=\"" + px(sc.left) + "\" y1=\"" + y + "\" x2=\"" + px(sc.right) +
               "\" y2=\"" + y +
               "\" stroke=\"#000\" stroke-width=\"1.2\" stroke-dasharray=\"7 4\" data-theta=\"" +
               fmt_sig12(*r.theta) + "\"/>\n";
        svg += "<text x=\"" + px(sc.right - 4) + "\" y=\"" + px(sc.sy(*r.theta) - 5) +
               "\" class=\"tick\" text-anchor=\"end\">&#952;=" + fmt_general(*r.theta, 6) +
               "</text>\n";
    }

    for (std::size_t i = 0; i < r.series.size(); ++i) {
        const TimeSeries& s = r.series[i];
        svg += polyline(sc, s.times, s.values,
                        "stroke=\"" + std::string(series_color(i)) +
                            "\" stroke-width=\"1.8\" data-series=\"" + html_escape(s.name) +
                            "\"");
    }
    for (std::size_t i = 0; i < r.kernel_traces.size(); ++i) {
        const MetricSeries& t = r.kernel_traces[i];
        svg += polyline(sc, t.times, t.values,
                        "stroke=\"" + std::string(series_color(i)) +
                            "\" stroke-width=\"1.2\" stroke-dasharray=\"6 3\" data-role=\"kauc\" "
                            "data-trace=\"" +
                            html_escape(t.name) + "\"");
    }
    for (std::size_t i = 0; i < r.derivative_traces.size(); ++i) {
        const auto& [d1, d2] = r.derivative_traces[i];
        svg += polyline(sc, d1.times, d1.values,
                        "stroke=\"" + std::string(series_color(i)) +
                            "\" stroke-width=\"1\" stroke-dasharray=\"2 2\" data-role=\"d1\" "
                            "data-trace=\"" +
                            html_escape(d1.name) + "\"");
        svg += polyline(sc, d2.times, d2.values,
                        "stroke=\"" + std::string(series_color(i)) +
                            "\" stroke-width=\"1\" stroke-dasharray=\"1 3\" data-role=\"d2\" "
                            "data-trace=\"" +
                            html_escape(d2.name) + "\"");
    }

    if (!r.dip_metric_selection.empty()) {
        for (const SeriesDipMetrics& sm : r.dip_metrics) {
            const SeriesDips* sd = nullptr;
            for (const SeriesDips& cand : r.dips) {
                if (cand.series == sm.series) sd = &cand;
            }
            if (!sd) continue;
            for (std::size_t i = 0; i < sm.per_dip.size() && i < sd->items.size(); ++i) {
                const Dip& d = sd->items[i];
                svg += "<text x=\"" + px(sc.sx(d.t_min)) + "\" y=\"" +
                       px(std::min(sc.sy(d.q_min) + 14, sc.bottom - 4)) +
                       "\" class=\"annot\" text-anchor=\"middle\" data-annot=\"" +
                       html_escape(sm.series) + ":" + std::to_string(i) + "\">" +
                       html_escape(annotation_text(sm.per_dip[i], r.dip_metric_selection)) +
                       "</text>\n";
            }
        }
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string render_alpha_chart(const AnalysisReport& r,
                                      const std::vector<std::string>& tokens) {
    ChartScale sc;
    sc.x_min = -0.5;
    sc.x_max = static_cast<double>(tokens.size()) - 0.5;
    sc.y_min = 0.0;
    sc.y_max = 1.25;
    for (const SeriesAntifragility& sa : r.antifragility) {
        for (const AntifragilityScore& s : sa.scores) {
            if (s.alpha.defined()) sc.y_max = std::max(sc.y_max, s.alpha.value() * 1.15);
        }
        if (sa.mean.alpha.defined()) {
            sc.y_max = std::max(sc.y_max, sa.mean.alpha.value() * 1.15);
        }
    }
    sc.left = 55;
    sc.right = 585;
    sc.top = 12;
    sc.bottom = 248;

    std::string svg = "<svg class=\"chart\" viewBox=\"0 0 600 280\" role=\"img\">\n";
    for (double v : nice_ticks(sc.y_min, sc.y_max, 5)) {
        std::string y = px(sc.sy(v));
        svg += "<line x1=\"" + px(sc.left) + "\" y1=\"" + y + "\" x2=\"" + px(sc.right) +
               "\" y2=\"" + y + "\" class=\"grid\"/>";
        svg += "<text x=\"" + px(sc.left - 6) + "\" y=\"" + y +
               "\" class=\"tick\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
               fmt_general(v, 6) + "</text>\n";
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        svg += "<text x=\"" + px(sc.sx(static_cast<double>(i))) + "\" y=\"" +
               px(sc.bottom + 16) + "\" class=\"tick\" text-anchor=\"middle\">" +
               html_escape(dip_metric_label(tokens[i])) + "</text>\n";
    }
    svg += "<rect x=\"" + px(sc.left) + "\" y=\"" + px(sc.top) + "\" width=\"" +
           px(sc.right - sc.left) + "\" height=\"" + px(sc.bottom - sc.top) +
           "\" class=\"frame\"/>\n";

    std::size_t color_i = 0;
    for (const SeriesAntifragility& sa : r.antifragility) {
        std::string color = series_color(color_i);
        if (sa.mean.alpha.defined()) {
            std::string y = px(sc.sy(sa.mean.alpha.value()));
            svg += "<line x1=\"" + px(sc.left) + "\" y1=\"" + y + "\" x2=\"" + px(sc.right) +
                   "\" y2=\"" + y + "\" stroke=\"" + color +
                   "\" stroke-width=\"1.2\" stroke-dasharray=\"7 4\" data-mean-alpha=\"" +
                   html_escape(sa.series) + "\"/>\n";
        }
        for (std::size_t i = 0; i < sa.scores.size() && i < tokens.size(); ++i) {
            if (!sa.scores[i].alpha.defined()) continue;
            svg += "<circle cx=\"" + px(sc.sx(static_cast<double>(i))) + "\" cy=\"" +
                   px(sc.sy(sa.scores[i].alpha.value())) + "\" r=\"4\" fill=\"" + color +
                   "\" data-alpha=\"" + html_escape(sa.series) + ":" +
                   html_escape(tokens[i]) + "\"/>\n";
        }
        ++color_i;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace detail

/// Self-contained HTML document: inline styles, inline SVG charts, no
/// external resources. Annotation numbers are the JSON values rounded to 4
/// decimal places.
inline std::string to_html(const AnalysisReport& r) {
    using detail::fmt_fixed;
    using detail::html_escape;
    std::string h;
    h += "<meta charset=\"utf-8\">\n";
    h += "<title>resil report</title>\n";
    h += "<style>\n"
         "body{font:14px/1.45 system-ui,sans-serif;margin:24px;color:#222;background:#fff;}\n"
         "h1{font-size:20px;} h2{font-size:16px;margin-top:28px;}\n"
         ".meta{color:#555;}\n"
         "svg.chart{max-width:100%;height:auto;display:block;margin:12px 0;}\n"
         ".grid{stroke:#ddd;stroke-width:0.6;}\n"
         ".frame{fill:none;stroke:#888;stroke-width:1;}\n"
         ".tick{font-size:11px;fill:#444;}\n"
         ".annot{font-size:11px;fill:#222;}\n"
         "table{border-collapse:collapse;margin:10px 0;}\n"
         "td,th{border:1px solid #ccc;padding:3px 9px;text-align:left;font-size:13px;}\n"
         "th{background:#f3f3f3;}\n"
         ".swatch{display:inline-block;width:22px;height:3px;vertical-align:middle;}\n"
         "</style>\n";
    h += "<h1>Resilience analysis</h1>\n";
    h += "<p class=\"meta\">source: " + html_escape(r.source.path.empty() ? "(in-memory)" : r.source.path) +
         " (" + html_escape(r.source.format) + " format) &#183; generated " +
         html_escape(r.timestamp) + " &#183; tool version " + html_escape(r.tool_version) +
         "</p>\n";

    h += detail::render_main_chart(r);

    h += "<table>\n<tr><th>legend</th><th>meaning</th></tr>\n";
    for (std::size_t i = 0; i < r.series.size(); ++i) {
        h += "<tr><td><span class=\"swatch\" style=\"background:" +
             std::string(detail::series_color(i)) + "\"></span></td><td>" +
             html_escape(r.series[i].name) + "</td></tr>\n";
    }
    if (r.theta) {
        h += "<tr><td>dashed black line</td><td>threshold &#952; = " +
             detail::fmt_general(*r.theta, 6) + "</td></tr>\n";
    }
    if (!r.dips.empty()) {
        h += "<tr><td>tinted bands</td><td>detected dips (series color)</td></tr>\n";
    }
    if (!r.kernel_traces.empty()) {
        h += "<tr><td>long-dash overlay</td><td>kernel-weighted AUC trace (" +
             html_escape(r.kernel ? r.kernel->name() : "") + " kernel)</td></tr>\n";
    }
    if (!r.derivative_traces.empty()) {
        h += "<tr><td>short-dash / dotted overlays</td><td>first / second derivative</td></tr>\n";
    }
    if (!r.dip_metric_selection.empty()) {
        h += "<tr><td>(A=&#8230;, B=&#8230;) labels</td><td>per-dip metrics at each dip minimum, "
             "rounded to 4 decimals</td></tr>\n";
    }
    h += "</table>\n";

    bool any_dips = false;
    for (const SeriesDips& sd : r.dips) {
        if (!sd.items.empty()) any_dips = true;
    }
    if (any_dips) {
        h += "<h2>Dips</h2>\n<table>\n"
             "<tr><th>series</th><th>#</th><th>t_start</th><th>t_min</th><th>t_end</th>"
             "<th>q_before</th><th>q_min</th><th>q_after</th></tr>\n";
        for (const SeriesDips& sd : r.dips) {
            for (std::size_t i = 0; i < sd.items.size(); ++i) {
                const Dip& d = sd.items[i];
                h += "<tr><td>" + html_escape(sd.series) + "</td><td>" + std::to_string(i) +
                     "</td><td>" + fmt_fixed(d.t_start, 4) + "</td><td>" +
                     fmt_fixed(d.t_min, 4) + "</td><td>" + fmt_fixed(d.t_end, 4) +
                     "</td><td>" + fmt_fixed(d.q_before, 4) + "</td><td>" +
                     fmt_fixed(d.q_min, 4) + "</td><td>" + fmt_fixed(d.q_after, 4) +
                     "</td></tr>\n";
            }
        }
        h += "</table>\n";
    }

    if (!r.antifragility.empty()) {
        h += "<h2>Antifragility</h2>\n";
        std::vector<std::string> tokens;
        for (const AntifragilityScore& s : r.antifragility.front().scores) {
            tokens.push_back(s.metric_name);
        }
        h += detail::render_alpha_chart(r, tokens);
        h += "<p class=\"meta\">Dashed horizontal lines mark the mean antifragility "
             "&#945; of each series.</p>\n";
        h += "<table>\n<tr><th>series</th><th>metric</th><th>&#945;</th>"
             "<th>classification</th><th>dips</th><th>notes</th></tr>\n";
        for (std::size_t si = 0; si < r.antifragility.size(); ++si) {
            const SeriesAntifragility& sa = r.antifragility[si];
            for (const AntifragilityScore& s : sa.scores) {
                h += "<tr><td>" + html_escape(sa.series) + "</td><td>" +
                     html_escape(detail::dip_metric_label(s.metric_name)) + "</td><td>" +
                     (s.alpha.defined() ? fmt_fixed(s.alpha.value(), 4) : "n/a") + "</td><td>" +
                     classification_name(s.classification) + "</td><td>" +
                     std::to_string(s.n_dips) + "</td><td>" +
                     html_escape(s.alpha.defined() ? s.note : s.alpha.reason()) +
                     "</td></tr>\n";
            }
            h += "<tr><td>" + html_escape(sa.series) + "</td><td>mean</td><td>" +
                 (sa.mean.alpha.defined() ? fmt_fixed(sa.mean.alpha.value(), 4) : "n/a") +
                 "</td><td>" + classification_name(sa.mean.classification) + "</td><td>" +
                 std::to_string(sa.mean.n_dips) + "</td><td>" +
                 html_escape(sa.mean.alpha.defined() ? sa.mean.note : sa.mean.alpha.reason()) +
                 "</td></tr>\n";
        }
        h += "</table>\n";
    }

    if (!r.warnings.empty()) {
        h += "<h2>Warnings</h2>\n<ul>\n";
        for (const std::string& w : r.warnings) {
            h += "<li>" + html_escape(w) + "</li>\n";
        }
        h += "</ul>\n";
    }
    return h;
}

}  // namespace resil

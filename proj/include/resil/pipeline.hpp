#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
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
#include "resil/preprocess.hpp"
#include "resil/report.hpp"
#include "resil/series.hpp"

namespace resil {

/// One analysis run, as configured on the command line. Field defaults are
/// the CLI defaults.
struct RunConfig {
    std::string input_path;
    InputFormat format = InputFormat::auto_detect;
    std::optional<double> window_t0;
    std::optional<double> window_t1;
    std::optional<double> filter_delta;
    bool smooth = false;
    std::size_t smooth_max_segments = 12;
    bool want_auc = false;
    std::optional<std::string> kernel_kind;
    double half_life = 1.0;
    double kernel_scale = 1.0;
    std::optional<double> theta;
    bool want_derivatives = false;
    std::optional<DipMode> dip_mode;
    std::string dips_file;
    double slope_tol = -1.0;  // < 0: resolve per series
    std::size_t max_segments = 12;
    std::size_t search_budget = 0;  // 0: exhaustive
    std::vector<std::string> dip_metrics;
    bool antifragility = false;
    std::vector<std::string> antifragility_metrics = {"r", "rr", "ac"};
    std::string out_json;
    std::string out_html;
    std::string out_figure;
    std::uint64_t seed = 0;
    bool dry_run = false;
    int verbosity = 0;
    bool emit_timings = false;
};

namespace detail {

inline const std::set<std::string>& selectable_dip_tokens() {
    static const std::set<std::string> tokens{"aucd", "r", "rr", "ac", "ra", "irm"};
    return tokens;
}

/// Expands "all", pulls in the IRM factors when IRM is selected, and
/// returns the set in canonical report order.
inline std::vector<std::string> resolve_dip_metric_selection(
    const std::vector<std::string>& requested) {
    std::set<std::string> chosen;
    for (const std::string& token : requested) {
        if (token == "all") {
            chosen.insert(selectable_dip_tokens().begin(), selectable_dip_tokens().end());
        } else if (selectable_dip_tokens().count(token)) {
            chosen.insert(token);
        } else {
            throw ConfigError("unknown dip metric \"" + token +
                              "\" (expected aucd, r, rr, ac, ra, irm, or all)");
        }
    }
    if (chosen.count("irm")) {
        chosen.insert("tapl");
        chosen.insert("rapi");
    }
    std::vector<std::string> ordered;
    for (const std::string& token : dip_metric_token_order()) {
        if (chosen.count(token)) ordered.push_back(token);
    }
    return ordered;
}

inline void check_antifragility_tokens(const std::vector<std::string>& tokens) {
    std::set<std::string> seen;
    for (const std::string& token : tokens) {
        if (!selectable_dip_tokens().count(token)) {
            throw ConfigError("unknown antifragility metric \"" + token +
                              "\" (expected r, rr, ac, ra, aucd, or irm)");
        }
        if (!seen.insert(token).second) {
            throw ConfigError("antifragility metric \"" + token + "\" given more than once");
        }
    }
}

inline std::string iso8601_utc(long long epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm_utc{};
#if defined(_WIN32)
    gmtime_s(&tm_utc, &t);
#else
    gmtime_r(&t, &tm_utc);
#endif
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

/// Report timestamps are reproducible: SOURCE_DATE_EPOCH when set, else a
/// fixed epoch. Wall-clock time never enters the report.
inline std::string resolve_timestamp() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && end != env) {
            return iso8601_utc(v);
        }
        throw ConfigError("SOURCE_DATE_EPOCH is not an integer: \"" + std::string(env) + "\"");
    }
    return "1970-01-01T00:00:00Z";
}

inline std::vector<std::pair<double, double>> parse_dips_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read dips file \"" + path + "\"");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc;
    try {
        doc = parse_json_document(text);
    } catch (const ParseError& e) {
        throw ParseError("dips file \"" + path + "\": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("dips") || !doc["dips"].is_array()) {
        throw FormatError("dips file \"" + path + "\" needs a top-level \"dips\" array");
    }
    std::vector<std::pair<double, double>> intervals;
    for (std::size_t i = 0; i < doc["dips"].size(); ++i) {
        const auto& node = doc["dips"][i];
        if (!node.is_object() || !node.contains("t_start") || !node.contains("t_end") ||
            !node["t_start"].is_number() || !node["t_end"].is_number()) {
            throw ValidationError("dips file entry " + std::to_string(i) +
                                  " needs numeric t_start and t_end");
        }
        intervals.emplace_back(node["t_start"].get<double>(), node["t_end"].get<double>());
    }
    return intervals;
}

inline nlohmann::ordered_json config_echo(const RunConfig& cfg,
                                          const std::vector<std::string>& dip_selection) {
    using json = nlohmann::ordered_json;
    json c;
    c["input"] = cfg.input_path;
    c["format"] = input_format_name(cfg.format);
    if (cfg.window_t0 && cfg.window_t1) {
        c["window"] = {{"t0", *cfg.window_t0}, {"t1", *cfg.window_t1}};
    } else {
        c["window"] = nullptr;
    }
    c["filter_delta"] = cfg.filter_delta ? json(*cfg.filter_delta) : json();
    c["smooth"] = cfg.smooth;
    c["smooth_max_segments"] = cfg.smooth_max_segments;
    c["auc"] = cfg.want_auc;
    if (cfg.kernel_kind) {
        json k;
        k["kind"] = *cfg.kernel_kind;
        if (*cfg.kernel_kind == "exp" || *cfg.kernel_kind == "exponential") {
            k["half_life"] = cfg.half_life;
        } else if (*cfg.kernel_kind == "inverse") {
            k["scale"] = cfg.kernel_scale;
        }
        c["kernel"] = std::move(k);
    } else {
        c["kernel"] = nullptr;
    }
    c["threshold"] = cfg.theta ? json(*cfg.theta) : json();
    c["derivatives"] = cfg.want_derivatives;
    c["dips"] = cfg.dip_mode ? json(dip_mode_name(*cfg.dip_mode)) : json();
    c["dips_file"] = cfg.dips_file.empty() ? json() : json(cfg.dips_file);
    c["slope_tol"] = cfg.slope_tol < 0.0 ? json() : json(cfg.slope_tol);
    c["max_segments"] = cfg.max_segments;
    c["search_budget"] = cfg.search_budget;
    c["dip_metrics"] = dip_selection;
    c["antifragility"] = cfg.antifragility;
    c["antifragility_metrics"] = cfg.antifragility ? json(cfg.antifragility_metrics) : json::array();
    c["out_json"] = cfg.out_json.empty() ? json() : json(cfg.out_json);
    c["out_html"] = cfg.out_html.empty() ? json() : json(cfg.out_html);
    c["out_figure"] = cfg.out_figure.empty() ? json() : json(cfg.out_figure);
    c["seed"] = cfg.seed;
    c["dry_run"] = cfg.dry_run;
    c["emit_timings"] = cfg.emit_timings;
    return c;
}

class StageTimer {
  public:
    explicit StageTimer(std::vector<std::pair<std::string, double>>& sink, int verbosity,
                        std::ostream& err)
        : sink_(sink), verbosity_(verbosity), err_(err) {}

    template <typename F>
    auto time(const std::string& stage, F&& fn) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            finish(stage, start);
        } else {
            auto result = fn();
            finish(stage, start);
            return result;
        }
    }

  private:
    void finish(const std::string& stage,
                std::chrono::steady_clock::time_point start) {
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        sink_.emplace_back(stage, ms);
        if (verbosity_ > 0) {
            err_ << "stage " << stage << ": " << ms << " ms\n";
        }
    }

    std::vector<std::pair<std::string, double>>& sink_;
    int verbosity_;
    std::ostream& err_;
};

}  // namespace detail

/// Rejects contradictory or incomplete flag combinations before any work
/// happens. Throws ConfigError.
inline void validate_config(const RunConfig& cfg) {
    if (cfg.input_path.empty()) {
        throw ConfigError("no input file given");
    }
    if (!cfg.dry_run && cfg.out_json.empty() && cfg.out_html.empty() && cfg.out_figure.empty()) {
        throw ConfigError("no output requested: give --out-json, --out-html, or --out-figure");
    }
    if (cfg.window_t0.has_value() != cfg.window_t1.has_value()) {
        throw ConfigError("window needs both endpoints");
    }
    if (cfg.window_t0 && *cfg.window_t0 >= *cfg.window_t1) {
        throw ConfigError("window start must be before window end");
    }
    if (cfg.filter_delta && (!(*cfg.filter_delta > 0.0) || *cfg.filter_delta > 1.0)) {
        throw ConfigError("--filter-delta must be in (0, 1]");
    }
    if (cfg.smooth_max_segments < 1) {
        throw ConfigError("--smooth-max-segments must be at least 1");
    }
    if (cfg.max_segments < 1) {
        throw ConfigError("--max-segments must be at least 1");
    }
    if (cfg.theta && (*cfg.theta < 0.0 || *cfg.theta > 1.0)) {
        throw ConfigError("--threshold must be in [0, 1]");
    }
    if (cfg.kernel_kind) {
        const std::string& k = *cfg.kernel_kind;
        if (k != "uniform" && k != "exp" && k != "exponential" && k != "inverse") {
            throw ConfigError("unknown kernel \"" + k +
                              "\" (expected uniform, exp, or inverse)");
        }
        if ((k == "exp" || k == "exponential") &&
            (!(cfg.half_life > 0.0) || !std::isfinite(cfg.half_life))) {
            throw ConfigError("--half-life must be positive");
        }
        if (k == "inverse" && (!(cfg.kernel_scale > 0.0) || !std::isfinite(cfg.kernel_scale))) {
            throw ConfigError("--kernel-scale must be positive");
        }
    }
    if (!cfg.dip_metrics.empty() && !cfg.dip_mode) {
        throw ConfigError("--dip-metrics requires a dip detection mode (--dips)");
    }
    if (cfg.antifragility && !cfg.dip_mode) {
        throw ConfigError("--antifragility requires a dip detection mode (--dips)");
    }
    if (cfg.dip_mode && *cfg.dip_mode == DipMode::threshold && !cfg.theta) {
        throw ConfigError("--dips threshold requires --threshold");
    }
    if (cfg.dip_mode && *cfg.dip_mode == DipMode::manual && cfg.dips_file.empty()) {
        throw ConfigError("--dips manual requires --dips-file");
    }
    if (!cfg.dips_file.empty() && (!cfg.dip_mode || *cfg.dip_mode != DipMode::manual)) {
        throw ConfigError("--dips-file requires --dips manual");
    }
    detail::resolve_dip_metric_selection(cfg.dip_metrics);
    detail::check_antifragility_tokens(cfg.antifragility_metrics);
}

/// Runs every requested stage in fixed order and returns the complete
/// report. Throws resil::Error subclasses for user-addressable problems.
inline AnalysisReport analyze(const RunConfig& cfg, std::ostream& err = std::cerr) {
    validate_config(cfg);

    AnalysisReport report;
    report.emit_timings = cfg.emit_timings;
    detail::StageTimer timer(report.timings_ms, cfg.verbosity, err);

    SeriesBundle bundle = timer.time("ingest", [&] { return load(cfg.input_path, cfg.format); });
    report.source = bundle.source;
    report.warnings = bundle.warnings;

    std::optional<AnalysisWindow> window;
    if (cfg.window_t0) {
        window = AnalysisWindow(*cfg.window_t0, *cfg.window_t1);
    } else if (bundle.window) {
        window = bundle.window;
    }

    timer.time("preprocess", [&] {
        for (TimeSeries& s : bundle.series) {
            if (window) {
                s = slice(s, *window);
            }
            if (cfg.filter_delta) {
                s = value_update_filter(s, *cfg.filter_delta);
            }
            if (cfg.smooth) {
                SmoothResult sm = linreg_smooth(s, cfg.smooth_max_segments, cfg.search_budget,
                                                cfg.seed);
                report.preprocessing.smoothed_segments.emplace_back(s.name, sm.segments);
                s = std::move(sm.series);
            }
        }
    });
    report.preprocessing.value_update_delta = cfg.filter_delta;
    report.preprocessing.smoothing = cfg.smooth;
    report.preprocessing.max_segments = cfg.smooth_max_segments;

    report.series = bundle.series;
    for (const TimeSeries& s : report.series) {
        report.inputs.push_back({s.name, s.size(), s.t_first(), s.t_last()});
    }

    std::vector<std::pair<double, double>> manual_intervals;
    if (cfg.dip_mode && *cfg.dip_mode == DipMode::manual) {
        manual_intervals = detail::parse_dips_file(cfg.dips_file);
    }
    if (cfg.dip_mode) {
        timer.time("dips", [&] {
            DipConfig dc;
            dc.mode = *cfg.dip_mode;
            dc.theta = cfg.theta ? *cfg.theta : -1.0;
            dc.slope_tol = cfg.slope_tol;
            dc.k_max = cfg.max_segments;
            dc.budget = cfg.search_budget;
            dc.seed = cfg.seed;
            for (const TimeSeries& s : report.series) {
                SeriesDips sd;
                sd.series = s.name;
                sd.mode = dc.mode;
                if (dc.mode == DipMode::linreg) {
                    LinregDips lr = linreg_dips_detailed(s, dc);
                    sd.items = std::move(lr.dips);
                    sd.slope_tol = lr.slope_tol;
                    sd.segments = lr.segmentation.segment_count();
                } else {
                    sd.items = detect_dips(s, dc, manual_intervals);
                }
                report.dips.push_back(std::move(sd));
            }
        });
    }

    timer.time("metrics", [&] {
        if (cfg.want_auc) {
            for (const TimeSeries& s : report.series) {
                report.auc_values.push_back({s.name, auc(s)});
            }
        }
        if (cfg.kernel_kind) {
            const std::string& k = *cfg.kernel_kind;
            if (k == "uniform") {
                report.kernel = Kernel::uniform();
            } else if (k == "inverse") {
                report.kernel = Kernel::inverse(cfg.kernel_scale);
            } else {
                report.kernel = Kernel::exponential(cfg.half_life);
            }
            for (const TimeSeries& s : report.series) {
                report.kernel_traces.push_back(kernel_auc_trace(s, *report.kernel));
            }
        }
        if (cfg.theta) {
            report.theta = cfg.theta;
            for (const TimeSeries& s : report.series) {
                AnalysisWindow full(s.t_first(), s.t_last());
                report.threshold.emplace_back(s.name, threshold_stats(s, full, *cfg.theta));
            }
        }
        if (cfg.want_derivatives) {
            for (const TimeSeries& s : report.series) {
                report.derivative_traces.push_back(derivatives(s));
            }
        }
    });

    report.dip_metric_selection = detail::resolve_dip_metric_selection(cfg.dip_metrics);
    std::vector<SeriesDipMetrics> all_metrics;
    if (!report.dip_metric_selection.empty() || cfg.antifragility) {
        timer.time("dip_metrics", [&] {
            for (std::size_t i = 0; i < report.series.size(); ++i) {
                SeriesDipMetrics sm;
                sm.series = report.series[i].name;
                for (const Dip& d : report.dips[i].items) {
                    sm.per_dip.push_back(compute_dip_metrics(report.series[i], d));
                }
                all_metrics.push_back(std::move(sm));
            }
        });
    }
    if (!report.dip_metric_selection.empty()) {
        report.dip_metrics = all_metrics;
    }

    if (cfg.antifragility) {
        timer.time("antifragility", [&] {
            for (const SeriesDipMetrics& sm : all_metrics) {
                SeriesAntifragility sa;
                sa.series = sm.series;
                for (const std::string& token : cfg.antifragility_metrics) {
                    std::vector<double> values;
                    std::optional<std::string> failure;
                    for (std::size_t i = 0; i < sm.per_dip.size(); ++i) {
                        MetricValue v = detail::dip_metric_value(sm.per_dip[i], token);
                        if (!v.defined()) {
                            failure = "dip " + std::to_string(i) + ": " + v.reason();
                            break;
                        }
                        values.push_back(v.value());
                    }
                    if (failure) {
                        AntifragilityScore sc;
                        sc.metric_name = token;
                        sc.alpha = MetricValue::undefined(*failure);
                        sc.n_dips = sm.per_dip.size();
                        sc.classification = Classification::not_computable;
                        sa.scores.push_back(std::move(sc));
                    } else {
                        sa.scores.push_back(alpha(values, token));
                    }
                }
                sa.mean = mean_alpha(sa.scores);
                report.antifragility.push_back(std::move(sa));
            }
        });
    }

    report.config = detail::config_echo(cfg, report.dip_metric_selection);
    report.timestamp = detail::resolve_timestamp();
    return report;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open \"" + path + "\" for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw IoError("failed writing \"" + path + "\"");
    }
}

}  // namespace detail

/// Full CLI semantics: validate, analyze, write outputs. Returns the
/// process exit code: 0 success, 2 for input or configuration problems,
/// 1 for anything unexpected. Validation failures never leave partial
/// output files behind.
inline int run(const RunConfig& cfg, std::ostream& err = std::cerr) {
    try {
        if (cfg.dry_run) {
            validate_config(cfg);
            SeriesBundle bundle = load(cfg.input_path, cfg.format);
            if (cfg.dip_mode && *cfg.dip_mode == DipMode::manual) {
                detail::parse_dips_file(cfg.dips_file);
            }
            if (cfg.verbosity > 0) {
                err << "dry run: " << bundle.series.size() << " series from "
                    << bundle.source.path << " (" << bundle.source.format
                    << " format), no outputs written\n";
            }
            return 0;
        }
        AnalysisReport report = analyze(cfg, err);
        auto emit = [](const std::string& path, const std::string& content) {
            if (path == "-") {
                std::cout << content;
                std::cout.flush();
            } else {
                detail::write_file(path, content);
            }
        };
        if (!cfg.out_json.empty()) {
            emit(cfg.out_json, to_json(report));
        }
        if (!cfg.out_html.empty()) {
            emit(cfg.out_html, to_html(report));
        }
        if (!cfg.out_figure.empty()) {
            emit(cfg.out_figure, emit_figure_json(report));
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace resil

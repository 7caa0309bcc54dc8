#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resil/resil.hpp"

namespace {

int run_fixture(const resil::FixtureSpec& spec, const std::string& out_path) {
    try {
        resil::SeriesBundle bundle = resil::generate_fixture(spec);
        std::string doc = resil::serialize_native(bundle);
        doc += '\n';
        if (out_path.empty() || out_path == "-") {
            std::cout << doc;
        } else {
            resil::detail::write_file(out_path, doc);
        }
        return 0;
    } catch (const resil::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

std::uint64_t env_seed_default() {
    if (const char* env = std::getenv("RESIL_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) {
            return v;
        }
        std::cerr << "error: RESIL_SEED is not an integer: \"" << env << "\"\n";
        std::exit(2);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resil: resilience and antifragility metrics for normalized QoS series"};
    app.footer("Environment: RESIL_SEED sets the default --seed; SOURCE_DATE_EPOCH sets the\n"
               "report timestamp (a fixed epoch is used otherwise, keeping runs reproducible).");

    resil::RunConfig cfg;
    cfg.seed = env_seed_default();

    std::string format = "auto";
    std::string window;
    double filter_delta = -1.0;
    std::string kernel;
    double theta = -1.0;
    std::vector<std::string> dips_values;
    std::vector<std::string> dip_metrics;
    std::vector<std::string> af_metrics;

    app.add_option("--input", cfg.input_path, "Input JSON file")->type_name("PATH");
    app.add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"native", "figure", "auto"}))
        ->capture_default_str();
    app.add_option("--window", window, "Restrict analysis to [t0, t1]")->type_name("T0:T1");
    app.add_option("--filter-delta", filter_delta,
                   "Value-update filter threshold in (0, 1]")
        ->type_name("DELTA");
    app.add_flag("--smooth", cfg.smooth, "Piecewise-linear smoothing before analysis");
    app.add_option("--smooth-max-segments", cfg.smooth_max_segments,
                   "Segment cap for --smooth")
        ->capture_default_str();
    app.add_flag("--auc", cfg.want_auc, "Report time-normalized AUC per series");
    app.add_option("--kernel", kernel, "Kernel-weighted AUC trace: uniform, exp, or inverse")
        ->check(CLI::IsMember({"uniform", "exp", "exponential", "inverse"}));
    app.add_option("--half-life", cfg.half_life, "Half-life for --kernel exp")
        ->capture_default_str();
    app.add_option("--kernel-scale", cfg.kernel_scale, "Scale for --kernel inverse")
        ->capture_default_str();
    app.add_option("--threshold", theta, "Threshold statistics at this quality level")
        ->type_name("THETA");
    app.add_flag("--derivatives", cfg.want_derivatives,
                 "Report first and second derivative traces");
    app.add_option("--dips", dips_values,
                   "Dip detection mode: manual, max, threshold, or linreg (bare flag: max)")
        ->expected(0, 1)
        ->check(CLI::IsMember({"manual", "max", "threshold", "linreg"}));
    app.add_option("--dips-file", cfg.dips_file, "Dip intervals for --dips manual")
        ->type_name("PATH");
    app.add_option("--slope-tol", cfg.slope_tol,
                   "Steady-slope tolerance for --dips linreg (default: 0.01 per mean sample "
                   "spacing)")
        ->type_name("TOL");
    app.add_option("--max-segments", cfg.max_segments, "Segment cap for --dips linreg")
        ->capture_default_str();
    app.add_option("--search-budget", cfg.search_budget,
                   "Segment-count evaluations for linreg fits (0: exhaustive)")
        ->capture_default_str();
    app.add_option("--dip-metrics", dip_metrics,
                   "Per-dip metrics to report: aucd, r, rr, ac, ra, irm, all")
        ->delimiter(',');
    app.add_flag("--antifragility", cfg.antifragility,
                 "Report the antifragility degree per series");
    app.add_option("--antifragility-metrics", af_metrics,
                   "Metrics the antifragility degree is computed over")
        ->delimiter(',');
    app.add_option("--out-json", cfg.out_json, "Write the JSON report here (-: stdout)")
        ->type_name("PATH");
    app.add_option("--out-html", cfg.out_html, "Write the HTML report here (-: stdout)")
        ->type_name("PATH");
    app.add_option("--out-figure", cfg.out_figure, "Write figure-schema JSON here (-: stdout)")
        ->type_name("PATH");
    app.add_option("--seed", cfg.seed, "Seed for randomized search")->capture_default_str();
    app.add_flag("--dry-run", cfg.dry_run, "Validate configuration and input, write nothing");
    app.add_flag("-v,--verbose", cfg.verbosity, "Diagnostics and stage timings on stderr");
    app.add_flag("--emit-timings", cfg.emit_timings,
                 "Include stage timings in the JSON report (breaks byte-for-byte "
                 "reproducibility)");
    app.set_version_flag("--version", resil::kToolVersion);

    auto* fixture = app.add_subcommand("fixture", "Generate a test signal as native JSON");
    resil::FixtureSpec spec;
    std::string fixture_out = "-";
    fixture->add_option("--shape", spec.shape, "v, trapezoid, multi-dip, or noisy")
        ->required()
        ->check(CLI::IsMember({"v", "trapezoid", "multi-dip", "noisy"}));
    fixture->add_option("--depth", spec.depth, "Dip depth in (0, 1]")->capture_default_str();
    fixture->add_option("--length", spec.length, "Total duration (shape v)")
        ->capture_default_str();
    fixture->add_option("--dips", spec.dips, "Dip count (multi-dip, noisy)")
        ->capture_default_str();
    fixture->add_option("--points", spec.points, "Sample count (0: shape default)")
        ->capture_default_str();
    fixture->add_option("--noise", spec.noise, "Noise amplitude (noisy)")->capture_default_str();
    fixture->add_option("--seed", spec.seed, "Noise seed")->capture_default_str();
    fixture->add_option("--name", spec.name, "Series name (default: shape name)");
    fixture->add_option("--out", fixture_out, "Output path (-: stdout)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (fixture->parsed()) {
        return run_fixture(spec, fixture_out);
    }

    if (format == "native") {
        cfg.format = resil::InputFormat::native;
    } else if (format == "figure") {
        cfg.format = resil::InputFormat::figure;
    } else {
        cfg.format = resil::InputFormat::auto_detect;
    }
    if (!window.empty()) {
        auto colon = window.find(':');
        std::size_t parsed0 = 0, parsed1 = 0;
        try {
            if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
            double t0 = std::stod(window.substr(0, colon), &parsed0);
            double t1 = std::stod(window.substr(colon + 1), &parsed1);
            if (parsed0 != colon || parsed1 != window.size() - colon - 1) {
                throw std::invalid_argument("trailing characters");
            }
            cfg.window_t0 = t0;
            cfg.window_t1 = t1;
        } catch (const std::exception&) {
            std::cerr << "error: --window expects T0:T1 with numeric endpoints, got \""
                      << window << "\"\n";
            return 2;
        }
    }
    if (app.count("--filter-delta") > 0) {
        cfg.filter_delta = filter_delta;
    }
    if (!kernel.empty()) {
        cfg.kernel_kind = kernel;
    }
    if (app.count("--threshold") > 0) {
        cfg.theta = theta;
    }
    if (app.count("--slope-tol") > 0 && cfg.slope_tol < 0.0) {
        std::cerr << "error: --slope-tol must be non-negative\n";
        return 2;
    }
    if (app.count("--dips") > 0) {
        std::string mode = dips_values.empty() || dips_values.front().empty()
                               ? "max"
                               : dips_values.front();
        if (mode == "manual") {
            cfg.dip_mode = resil::DipMode::manual;
        } else if (mode == "max") {
            cfg.dip_mode = resil::DipMode::max;
        } else if (mode == "threshold") {
            cfg.dip_mode = resil::DipMode::threshold;
        } else {
            cfg.dip_mode = resil::DipMode::linreg;
        }
    }
    cfg.dip_metrics = dip_metrics;
    if (!af_metrics.empty()) {
        cfg.antifragility_metrics = af_metrics;
    }

    return resil::run(cfg);
}

// End-to-end library walkthrough: load a document, detect dips, score each
// one, and fold the per-dip scores into an antifragility degree. Also shows
// the programmatic kernel extension point the CLI does not expose.
//
//   ./resil_demo [input.json]   (default: demo/sample_input.json)

#include <cstdio>
#include <string>
#include <vector>

#include "resil/resil.hpp"

int main(int argc, char** argv) {
    std::string path = argc > 1 ? argv[1] : "demo/sample_input.json";

    try {
        resil::SeriesBundle bundle = resil::load(path);
        std::printf("%s: %zu series (%s format)\n\n", path.c_str(), bundle.series.size(),
                    bundle.source.format.c_str());

        // A step kernel: full weight for the last 2 time units, half before.
        resil::Kernel recent =
            resil::Kernel::custom("recent-step", [](double age) { return age <= 2.0 ? 1.0 : 0.5; });

        for (const resil::TimeSeries& s : bundle.series) {
            std::printf("series %s (%zu samples, t in [%g, %g])\n", s.name.c_str(), s.size(),
                        s.t_first(), s.t_last());
            std::printf("  %-12s %.6f\n", "auc", resil::auc(s));
            resil::MetricSeries kauc = resil::kernel_auc_trace(s, recent);
            std::printf("  %-12s %.6f (trace %s)\n", "kernel auc", kauc.values.back(),
                        kauc.name.c_str());

            std::vector<resil::Dip> dips = resil::max_dips(s);
            std::printf("  %-12s %zu\n", "dips", dips.size());

            std::vector<double> robustness;
            for (std::size_t i = 0; i < dips.size(); ++i) {
                resil::DipMetrics m = resil::compute_dip_metrics(s, dips[i]);
                std::string irm =
                    m.irm.defined() ? std::to_string(m.irm.value()) : m.irm.reason();
                std::printf("    dip %zu [%g, %g]: R %.3f RR %.3f AUC-D %.3f IRM %s\n", i,
                            dips[i].t_start, dips[i].t_end, m.robustness, m.recovery_rate,
                            m.auc_d, irm.c_str());
                robustness.push_back(m.robustness);
            }

            resil::AntifragilityScore score = resil::alpha(robustness, "r");
            if (score.alpha.defined()) {
                std::printf("  %-12s %.4f (%s)\n", "alpha(R)", score.alpha.value(),
                            resil::classification_name(score.classification));
            } else {
                std::printf("  %-12s %s\n", "alpha(R)", score.alpha.reason().c_str());
            }
            std::printf("\n");
        }
        return 0;
    } catch (const resil::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

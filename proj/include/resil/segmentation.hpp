#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "resil/common.hpp"
#include "resil/series.hpp"

namespace resil {

/// Least-squares line over an inclusive index range of a series.
struct SegmentFit {
    std::size_t first = 0;
    std::size_t last = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;

    double at(double t) const { return slope * t + intercept; }
};

/// A piecewise-linear fit with shared boundary samples: segment j covers
/// samples [breakpoints[j], breakpoints[j + 1]] inclusive, so adjacent
/// segments share one sample and every segment holds at least two.
struct Segmentation {
    std::vector<std::size_t> breakpoints;  // size k + 1; first 0, last n - 1
    std::vector<SegmentFit> segments;      // size k
    double sse = 0.0;
    double cost = 0.0;

    std::size_t segment_count() const { return segments.size(); }
};

/// Model-selection cost: n * ln(sse / n + 1e-12) + 3k * ln(n). The additive
/// epsilon keeps exact fits finite; 3 parameters per segment (slope,
/// intercept, boundary).
inline double segmentation_cost(std::size_t n, double sse, std::size_t k) {
    double dn = static_cast<double>(n);
    return dn * std::log(sse / dn + 1e-12) + 3.0 * static_cast<double>(k) * std::log(dn);
}

/// O(1) segment least-squares queries backed by prefix sums. Sums are taken
/// over globally centered coordinates so magnitudes stay small.
class SegmentCostModel {
public:
    explicit SegmentCostModel(const TimeSeries& s) : times_(&s.times), values_(&s.values) {
        std::size_t n = s.size();
        t_mean_ = 0.0;
        v_mean_ = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            t_mean_ += s.times[i];
            v_mean_ += s.values[i];
        }
        t_mean_ /= static_cast<double>(n);
        v_mean_ /= static_cast<double>(n);
        st_.assign(n + 1, 0.0);
        sv_.assign(n + 1, 0.0);
        stt_.assign(n + 1, 0.0);
        svv_.assign(n + 1, 0.0);
        stv_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double t = s.times[i] - t_mean_;
            double v = s.values[i] - v_mean_;
            st_[i + 1] = st_[i] + t;
            sv_[i + 1] = sv_[i] + v;
            stt_[i + 1] = stt_[i] + t * t;
            svv_[i + 1] = svv_[i] + v * v;
            stv_[i + 1] = stv_[i] + t * v;
        }
    }

    /// Sum of squared residuals of the least-squares line over samples
    /// [a, b] inclusive. Requires a < b.
    double sse(std::size_t a, std::size_t b) const {
        double m = static_cast<double>(b - a + 1);
        double st = st_[b + 1] - st_[a];
        double sv = sv_[b + 1] - sv_[a];
        double stt = stt_[b + 1] - stt_[a];
        double svv = svv_[b + 1] - svv_[a];
        double stv = stv_[b + 1] - stv_[a];
        double sxx = stt - st * st / m;
        double sxy = stv - st * sv / m;
        double syy = svv - sv * sv / m;
        // Times are strictly increasing and the range holds >= 2 samples,
        // so sxx > 0.
        double slope = sxy / sxx;
        double res = syy - slope * sxy;
        return res > 0.0 ? res : 0.0;
    }

    /// Full line description over [a, b] inclusive, in original coordinates.
    SegmentFit fit(std::size_t a, std::size_t b) const {
        double m = static_cast<double>(b - a + 1);
        double st = st_[b + 1] - st_[a];
        double sv = sv_[b + 1] - sv_[a];
        double stt = stt_[b + 1] - stt_[a];
        double svv = svv_[b + 1] - svv_[a];
        double stv = stv_[b + 1] - stv_[a];
        double sxx = stt - st * st / m;
        double sxy = stv - st * sv / m;
        double syy = svv - sv * sv / m;
        SegmentFit f;
        f.first = a;
        f.last = b;
        f.slope = sxy / sxx;
        double c = (sv - f.slope * st) / m;  // intercept in centered coordinates
        f.intercept = c + v_mean_ - f.slope * t_mean_;
        double res = syy - f.slope * sxy;
        f.sse = res > 0.0 ? res : 0.0;
        return f;
    }

private:
    const std::vector<double>* times_;
    const std::vector<double>* values_;
    double t_mean_ = 0.0;
    double v_mean_ = 0.0;
    std::vector<double> st_, sv_, stt_, svv_, stv_;
};

namespace detail {

/// Exact dynamic program over segment counts 1..k_top. Layer j holds, for
/// each end index i, the minimum total SSE of covering samples 0..i with j
/// shared-boundary segments. Ties take the smallest predecessor boundary.
class SegmentDp {
public:
    SegmentDp(const SegmentCostModel& model, std::size_t n, std::size_t k_top)
        : n_(n), k_top_(k_top) {
        const double inf = std::numeric_limits<double>::infinity();
        dp_.assign(k_top + 1, std::vector<double>(n, inf));
        choice_.assign(k_top + 1, std::vector<std::size_t>(n, 0));
        for (std::size_t i = 1; i < n; ++i) {
            dp_[1][i] = model.sse(0, i);
        }
        for (std::size_t j = 2; j <= k_top; ++j) {
            for (std::size_t i = j; i < n; ++i) {
                double best = inf;
                std::size_t arg = 0;
                for (std::size_t m = j - 1; m < i; ++m) {
                    double c = dp_[j - 1][m];
                    if (c == inf) continue;
                    c += model.sse(m, i);
                    if (c < best) {
                        best = c;
                        arg = m;
                    }
                }
                dp_[j][i] = best;
                choice_[j][i] = arg;
            }
        }
    }

    double total_sse(std::size_t k) const { return dp_[k][n_ - 1]; }

    std::vector<std::size_t> breakpoints(std::size_t k) const {
        std::vector<std::size_t> b(k + 1);
        b[k] = n_ - 1;
        for (std::size_t j = k; j >= 2; --j) {
            b[j - 1] = choice_[j][b[j]];
        }
        b[0] = 0;
        return b;
    }

private:
    std::size_t n_;
    std::size_t k_top_;
    std::vector<std::vector<double>> dp_;
    std::vector<std::vector<std::size_t>> choice_;
};

inline Segmentation build_segmentation(const SegmentCostModel& model, std::size_t n,
                                       const std::vector<std::size_t>& breakpoints) {
    Segmentation seg;
    seg.breakpoints = breakpoints;
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
        SegmentFit f = model.fit(breakpoints[j], breakpoints[j + 1]);
        total += f.sse;
        seg.segments.push_back(f);
    }
    seg.sse = total;
    seg.cost = segmentation_cost(n, total, seg.segment_count());
    return seg;
}

}  // namespace detail

/// Optimal piecewise-linear fit with exactly k segments, minimizing total
/// SSE over all shared-boundary placements. Requires at least 2k samples.
inline Segmentation fit_fixed_k(const TimeSeries& s, std::size_t k) {
    if (k < 1) {
        throw DomainError("segment count must be at least 1");
    }
    std::size_t n = s.size();
    if (n < 2 * k) {
        throw DegenerateFitError("series \"" + s.name + "\": " + std::to_string(n) +
                                 " samples cannot support " + std::to_string(k) +
                                 " segments (need at least " + std::to_string(2 * k) + ")");
    }
    SegmentCostModel model(s);
    detail::SegmentDp dp(model, n, k);
    return detail::build_segmentation(model, n, dp.breakpoints(k));
}

namespace detail {

/// Least-squares polynomial surrogate over evaluated (k, cost) pairs;
/// degree shrinks to what the sample count supports.
class CostSurrogate {
public:
    CostSurrogate(const std::vector<double>& ks, const std::vector<double>& costs) {
        std::size_t n = ks.size();
        k_center_ = 0.0;
        for (double k : ks) k_center_ += k;
        k_center_ /= static_cast<double>(n);
        std::size_t degree = n >= 3 ? 2 : (n == 2 ? 1 : 0);
        // Normal equations for sum over points of (c - sum_d a_d x^d)^2.
        std::size_t dim = degree + 1;
        std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
        std::vector<double> rhs(dim, 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            double x = ks[p] - k_center_;
            std::vector<double> pw(2 * dim - 1, 1.0);
            for (std::size_t d = 1; d < pw.size(); ++d) pw[d] = pw[d - 1] * x;
            for (std::size_t r = 0; r < dim; ++r) {
                for (std::size_t c = 0; c < dim; ++c) a[r][c] += pw[r + c];
                rhs[r] += costs[p] * pw[r];
            }
        }
        coef_ = solve(a, rhs);
        if (coef_.empty()) {
            // Singular system; fall back to the mean cost.
            double mean = 0.0;
            for (double c : costs) mean += c;
            coef_.assign(1, mean / static_cast<double>(n));
        }
        double ss = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double r = costs[p] - predict(ks[p]);
            ss += r * r;
        }
        sigma_ = std::sqrt(ss / static_cast<double>(n));
    }

    double predict(double k) const {
        double x = k - k_center_;
        double y = 0.0;
        for (std::size_t d = coef_.size(); d-- > 0;) {
            y = y * x + coef_[d];
        }
        return y;
    }

    double sigma() const { return sigma_; }

private:
    static std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
        std::size_t dim = b.size();
        for (std::size_t col = 0; col < dim; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < dim; ++r) {
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            }
            if (std::fabs(a[piv][col]) < 1e-12) return {};
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
            for (std::size_t r = col + 1; r < dim; ++r) {
                double f = a[r][col] / a[col][col];
                for (std::size_t c = col; c < dim; ++c) a[r][c] -= f * a[col][c];
                b[r] -= f * b[col];
            }
        }
        std::vector<double> x(dim, 0.0);
        for (std::size_t r = dim; r-- > 0;) {
            double s = b[r];
            for (std::size_t c = r + 1; c < dim; ++c) s -= a[r][c] * x[c];
            x[r] = s / a[r][r];
        }
        return x;
    }

    double k_center_ = 0.0;
    std::vector<double> coef_;
    double sigma_ = 0.0;
};

}  // namespace detail

/// Chooses the segment count k in [1, k_max] minimizing segmentation_cost,
/// evaluating at most `budget` candidate counts (0 means no limit). With an
/// unlimited budget every feasible k is scored; otherwise a deterministic
/// surrogate-guided search (seeded by `seed`) picks which counts to try.
/// Cost ties resolve to the smaller k.
inline Segmentation select_k(const TimeSeries& s, std::size_t k_max, std::size_t budget = 0,
                             std::uint64_t seed = 0) {
    if (k_max < 1) {
        throw DomainError("k_max must be at least 1");
    }
    std::size_t n = s.size();
    std::size_t k_hi = std::min(k_max, n / 2);
    if (k_hi < 1) {
        throw DegenerateFitError("series \"" + s.name + "\": " + std::to_string(n) +
                                 " samples cannot support any segmentation (need at least 2)");
    }
    SegmentCostModel model(s);

    if (budget == 0 || budget >= k_hi) {
        // Exhaustive: one pass of the dynamic program yields every layer.
        detail::SegmentDp dp(model, n, k_hi);
        std::size_t best_k = 1;
        double best_cost = segmentation_cost(n, dp.total_sse(1), 1);
        for (std::size_t k = 2; k <= k_hi; ++k) {
            double c = segmentation_cost(n, dp.total_sse(k), k);
            if (c < best_cost) {
                best_cost = c;
                best_k = k;
            }
        }
        return detail::build_segmentation(model, n, dp.breakpoints(best_k));
    }

    std::mt19937_64 rng(seed);
    std::vector<bool> tried(k_hi + 1, false);
    std::vector<double> ks, costs;
    std::size_t best_k = 0;
    double best_cost = std::numeric_limits<double>::infinity();

    auto evaluate = [&](std::size_t k) {
        detail::SegmentDp dp(model, n, k);
        double c = segmentation_cost(n, dp.total_sse(k), k);
        tried[k] = true;
        ks.push_back(static_cast<double>(k));
        costs.push_back(c);
        if (c < best_cost || (c == best_cost && k < best_k)) {
            best_cost = c;
            best_k = k;
        }
    };

    std::vector<std::size_t> initial{1, k_hi};
    if (k_hi > 3) {
        initial.push_back(2 + static_cast<std::size_t>(rng() % (k_hi - 2)));
    }
    std::size_t used = 0;
    for (std::size_t k : initial) {
        if (used >= budget) break;
        if (tried[k]) continue;
        evaluate(k);
        ++used;
    }

    while (used < budget) {
        detail::CostSurrogate surrogate(ks, costs);
        double mean_cost = 0.0;
        for (double c : costs) mean_cost += c;
        mean_cost /= static_cast<double>(costs.size());
        double spread = surrogate.sigma() + 1e-9 * (1.0 + std::fabs(mean_cost));
        std::size_t pick = 0;
        double pick_score = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= k_hi; ++k) {
            if (tried[k]) continue;
            double dist = std::numeric_limits<double>::infinity();
            for (double kk : ks) {
                dist = std::min(dist, std::fabs(static_cast<double>(k) - kk));
            }
            double score = surrogate.predict(static_cast<double>(k)) - spread * dist;
            if (score < pick_score) {
                pick_score = score;
                pick = k;
            }
        }
        if (pick == 0) break;  // every candidate evaluated
        evaluate(pick);
        ++used;
    }

    detail::SegmentDp dp(model, n, best_k);
    return detail::build_segmentation(model, n, dp.breakpoints(best_k));
}

/// Fitted value for every sample. A shared boundary sample takes the value
/// of the segment ending there.
inline std::vector<double> fitted_values(const TimeSeries& s, const Segmentation& seg) {
    if (seg.breakpoints.empty() || seg.breakpoints.back() != s.size() - 1) {
        throw SizeError("segmentation does not match series length");
    }
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t j = 0; j < seg.segments.size(); ++j) {
        std::size_t lo = seg.breakpoints[j] + (j == 0 ? 0 : 1);
        std::size_t hi = seg.breakpoints[j + 1];
        for (std::size_t i = lo; i <= hi; ++i) {
            out[i] = seg.segments[j].at(s.times[i]);
        }
    }
    return out;
}

}  // namespace resil

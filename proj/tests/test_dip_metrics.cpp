#include <gtest/gtest.h>

#include <random>

#include "resil/dip_metrics.hpp"
#include "resil/dips.hpp"
#include "test_util.hpp"

using resil::Dip;
using resil::DipMetrics;
using resil::MetricValue;
using resil::TimeSeries;

namespace {

TimeSeries make(std::vector<double> t, std::vector<double> v) {
    TimeSeries s;
    s.name = "s";
    s.times = std::move(t);
    s.values = std::move(v);
    return s;
}

Dip dip_of(const TimeSeries& s, double a, double b) {
    auto dips = resil::manual_dips(s, {{a, b}});
    return dips.front();
}

// Spec acceptance example: the canonical V dip, every metric checked at
// 1e-12.
TEST(DipMetrics, CanonicalVWorkedExample) {
    TimeSeries s = make({0, 1, 2}, {1, 0.5, 1});
    Dip d = dip_of(s, 0, 2);
    DipMetrics m = resil::compute_dip_metrics(s, d);
    EXPECT_NEAR(m.robustness, 0.5, 1e-12);
    EXPECT_NEAR(m.recovery_rate, 0.5, 1e-12);
    ASSERT_TRUE(m.adaptive_capacity.defined());
    EXPECT_NEAR(m.adaptive_capacity.value(), 1.0, 1e-12);
    ASSERT_TRUE(m.recovery_ability.defined());
    EXPECT_NEAR(m.recovery_ability.value(), 1.0, 1e-12);
    ASSERT_TRUE(m.rapi.defined());
    EXPECT_NEAR(m.rapi.value(), 1.0, 1e-12);
    EXPECT_NEAR(m.tapl, 0.25, 1e-12);
    ASSERT_TRUE(m.irm.defined());
    EXPECT_NEAR(m.irm.value(), 0.4, 1e-12);
    EXPECT_NEAR(m.auc_d, 0.75, 1e-12);
}

TEST(AucD, RectangleDipByHand) {
    TimeSeries s = make({0, 1, 2, 3}, {1, 0, 0, 1});
    Dip d = dip_of(s, 0, 3);
    EXPECT_NEAR(resil::auc_d(s, d), 1.0 / 3.0, 1e-12);
}

TEST(AucD, ConstantOverDip) {
    TimeSeries s = make({0, 1, 2}, {0.6, 0.6, 0.6});
    Dip d{0.0, 2.0, 0.0, 0.6, 0.6, 0.6};
    EXPECT_DOUBLE_EQ(resil::auc_d(s, d), 0.6);
}

TEST(Robustness, SlicedWindowMinimum) {
    TimeSeries s = make({0, 1, 2}, {1, 0.5, 1});
    Dip d = dip_of(s, 0.5, 1.5);
    EXPECT_DOUBLE_EQ(resil::robustness(s, d), 0.5);
}

TEST(RecoveryRate, Reciprocal) {
    Dip d{0.0, 0.25, 0.1, 1.0, 1.0, 0.5};
    EXPECT_DOUBLE_EQ(resil::recovery_rate(d), 4.0);
    Dip unit{0.0, 1.0, 0.5, 1.0, 1.0, 0.5};
    EXPECT_DOUBLE_EQ(resil::recovery_rate(unit), 1.0);
}

TEST(AdaptiveCapacity, RatioAndImprovement) {
    Dip d{0, 1, 0.5, 1.0, 0.9, 0.3};
    EXPECT_DOUBLE_EQ(resil::adaptive_capacity(d).value(), 0.9);
    Dip improve{0, 1, 0.5, 0.8, 1.0, 0.3};
    EXPECT_DOUBLE_EQ(resil::adaptive_capacity(improve).value(), 1.25);
}

TEST(AdaptiveCapacity, UndefinedWhenBaselineZero) {
    Dip d{0, 1, 0.5, 0.0, 0.4, 0.0};
    MetricValue v = resil::adaptive_capacity(d);
    EXPECT_FALSE(v.defined());
    EXPECT_FALSE(v.reason().empty());
    EXPECT_THROW(v.value(), std::logic_error);
}

TEST(RecoveryAbility, SpecExamples) {
    Dip d{0, 1, 0.5, 1.0, 0.9, 0.3};
    EXPECT_NEAR(resil::recovery_ability(d).value(), 6.0 / 7.0, 1e-12);
    Dip full{0, 1, 0.5, 1.0, 1.0, 0.3};
    EXPECT_DOUBLE_EQ(resil::recovery_ability(full).value(), 1.0);
    Dip none{0, 1, 0.5, 1.0, 0.3, 0.3};
    EXPECT_DOUBLE_EQ(resil::recovery_ability(none).value(), 0.0);
}

TEST(RecoveryAbility, UndefinedWithoutDeterioration) {
    Dip d{0, 1, 0.5, 0.7, 0.7, 0.7};
    EXPECT_FALSE(resil::recovery_ability(d).defined());
}

TEST(Tapl, SignConvention) {
    // Below the baseline: positive. Above it: negative.
    TimeSeries below = make({0, 1, 2}, {1, 0.5, 1});
    EXPECT_GT(resil::tapl(below, dip_of(below, 0, 2)), 0.0);
    TimeSeries above = make({0, 1, 2}, {0.5, 1, 0.5});
    Dip d{0.0, 2.0, 0.0, 0.5, 0.5, 0.5};
    EXPECT_LT(resil::tapl(above, d), 0.0);
}

// Spec acceptance criterion: tapl + auc_d = q_before exactly (both are
// integrals against the same interpolant over the same window).
TEST(Tapl, PlusAucDEqualsBaseline) {
    std::mt19937_64 rng(401);
    int checked = 0;
    while (checked < 100) {
        TimeSeries s = testutil::random_series(rng, 5 + rng() % 25);
        auto dips = resil::max_dips(s);
        for (const Dip& d : dips) {
            double t = resil::tapl(s, d);
            double a = resil::auc_d(s, d);
            EXPECT_NEAR(t + a, d.q_before, 1e-12);
            ++checked;
        }
    }
}

TEST(Rapi, UndefinedAtBoundaryMinimum) {
    TimeSeries s = make({0, 1, 2}, {0.9, 0.5, 0.2});
    Dip d = dip_of(s, 0, 2);  // minimum sits at t_end
    MetricValue v = resil::rapi(d);
    EXPECT_FALSE(v.defined());
    EXPECT_NE(v.reason().find("end"), std::string::npos);
}

TEST(Rapi, UndefinedWithoutDrop) {
    Dip flat{0, 2, 1, 0.7, 0.7, 0.7};
    EXPECT_FALSE(resil::rapi(flat).defined());
}

TEST(Rapi, AsymmetricSlopes) {
    // Drop over 1 time unit, recovery over 3: RAPI = |recovery|/|disruption|.
    Dip d{0.0, 4.0, 1.0, 1.0, 1.0, 0.4};
    // disruption slope: (0.4 - 1.0) / 1 = -0.6; recovery: (1.0 - 0.4) / 3 = 0.2
    EXPECT_NEAR(resil::rapi(d).value(), 0.2 / 0.6, 1e-12);
}

TEST(Irm, UndefinedReasonsPropagate) {
    TimeSeries s = make({0, 1, 2}, {0.9, 0.5, 0.2});
    Dip d = dip_of(s, 0, 2);
    MetricValue v = resil::irm(s, d);
    EXPECT_FALSE(v.defined());
    EXPECT_NE(v.reason().find("rapi"), std::string::npos);
}

TEST(Irm, MatchesFactorProduct) {
    std::mt19937_64 rng(402);
    int checked = 0;
    while (checked < 50) {
        TimeSeries s = testutil::random_series(rng, 5 + rng() % 25);
        for (const Dip& d : resil::max_dips(s)) {
            DipMetrics m = resil::compute_dip_metrics(s, d);
            if (!m.irm.defined()) continue;
            ASSERT_TRUE(m.rapi.defined());
            ASSERT_TRUE(m.recovery_ability.defined());
            double expected = m.robustness * m.rapi.value() / (m.tapl + 1.0) *
                              m.recovery_ability.value();
            EXPECT_NEAR(m.irm.value(), expected, 1e-12);
            ++checked;
        }
    }
}

TEST(MetricValue, OfAndUndefined) {
    MetricValue v = MetricValue::of(0.5);
    EXPECT_TRUE(v.defined());
    EXPECT_DOUBLE_EQ(v.value(), 0.5);
    MetricValue u = MetricValue::undefined("because");
    EXPECT_FALSE(u.defined());
    EXPECT_EQ(u.reason(), "because");
}

TEST(DipMetrics, InvariantRanges) {
    std::mt19937_64 rng(403);
    int checked = 0;
    while (checked < 60) {
        TimeSeries s = testutil::random_series(rng, 5 + rng() % 25);
        for (const Dip& d : resil::max_dips(s)) {
            DipMetrics m = resil::compute_dip_metrics(s, d);
            EXPECT_GE(m.robustness, 0.0);
            EXPECT_LE(m.robustness, 1.0);
            EXPECT_GT(m.recovery_rate, 0.0);
            EXPECT_GE(m.auc_d, 0.0);
            EXPECT_LE(m.auc_d, 1.0);
            EXPECT_GE(m.tapl, -1.0);
            EXPECT_LE(m.tapl, 1.0);
            if (m.adaptive_capacity.defined()) {
                EXPECT_GE(m.adaptive_capacity.value(), 0.0);
            }
            if (m.rapi.defined()) {
                EXPECT_GE(m.rapi.value(), 0.0);
            }
            if (m.irm.defined()) {
                EXPECT_GE(m.irm.value(), 0.0);
            }
            ++checked;
        }
    }
}

}  // namespace

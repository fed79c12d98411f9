#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/censor.hpp"

using namespace maxstab;

TEST(Elementary, MeasureAndCdf) {
    const CensorSet e = make_elementary({{0.1, 0.3}, {0.5, 0.9}});
    EXPECT_NEAR(e.total(), 0.6, 1e-15);
    EXPECT_NEAR(e.measure(0.2, 0.6), 0.2, 1e-15);
    EXPECT_NEAR(e.measure(0.6, 0.2), 0.2, 1e-15);
    EXPECT_NEAR(e.cdf(0.4), 0.2, 1e-15);
    EXPECT_NEAR(e.quantile(0.3), 0.6, 1e-12);
    EXPECT_THROW(e.measure(-0.5, 0.2), std::out_of_range);
}

TEST(Elementary, CellAndNodeMasses) {
    const CensorSet e = make_elementary({{0.25, 0.75}});
    const TimeGrid g(0.0, 1.0, 3);
    const auto cm = e.cell_masses(g);
    ASSERT_EQ(cm.size(), 8u);
    EXPECT_DOUBLE_EQ(cm[0], 0.0);
    EXPECT_DOUBLE_EQ(cm[2], 0.125);
    const auto nm = e.node_masses(g);
    ASSERT_EQ(nm.size(), 9u);
    EXPECT_DOUBLE_EQ(nm[2], 0.0625);  // half the centred cell
    EXPECT_DOUBLE_EQ(nm[4], 0.125);
}

TEST(Cantor, MiddleThirdIsNull) {
    const CensorSet c = make_cantor(uniform_schedule(1.0 / 3.0, 20));
    EXPECT_NEAR(c.total(), std::pow(2.0 / 3.0, 20), 1e-12);
}

TEST(Cantor, ZeroScheduleIsWindow) {
    const CensorSet c = make_cantor(std::vector<double>(10, 0.0), {0.0, 2.0});
    EXPECT_DOUBLE_EQ(c.total(), 2.0);
    EXPECT_DOUBLE_EQ(c.measure(0.3, 1.7), 1.4);
}

TEST(Cantor, AlphaScheduleHasHalfMeasure) {
    for (double a : {2.0, 4.0}) {
        const auto r = alpha_schedule(a, 20);
        double keep = 1.0;
        for (double x : r) {
            EXPECT_GE(x, 0.0);
            EXPECT_LT(x, 1.0);
            keep *= 1.0 - x;
        }
        EXPECT_NEAR(make_cantor(r).total(), keep, 1e-12);
        EXPECT_NEAR(keep, 0.5, 1e-12);
    }
}

TEST(Cantor, CdfMatchesLevelStructure) {
    // one level, gap fraction 1/2: E = [0,1/4] u [3/4,1]
    const CensorSet c = make_cantor({0.5});
    EXPECT_DOUBLE_EQ(c.measure(0.0, 0.25), 0.25);
    EXPECT_DOUBLE_EQ(c.measure(0.25, 0.75), 0.0);
    EXPECT_DOUBLE_EQ(c.total(), 0.5);
}

TEST(Complement, Measures) {
    const CensorSet e = make_elementary({{0.2, 0.5}});
    const CensorSet c = complement(e);
    EXPECT_NEAR(c.total(), 0.7, 1e-15);
    EXPECT_NEAR(c.measure(0.0, 0.3), 0.2, 1e-15);
    EXPECT_EQ(complement(c).kind(), SetKind::Elementary);
}

TEST(Serialization, ExactRoundTrip) {
    const std::vector<CensorSet> sets{make_elementary({{0.1, 0.2}, {0.3, 1.0 / 3.0}}),
                                      make_cantor(alpha_schedule(3.0, 12), {0.0, 1.0}, 3.0),
                                      complement(make_elementary({{0.25, 0.5}}))};
    for (const auto& s : sets) {
        const std::string text = set_to_string(s);
        const CensorSet back = set_from_string("# header line\n" + text);
        EXPECT_EQ(back.kind(), s.kind());
        EXPECT_EQ(set_to_string(back), text);
        for (double t : {0.05, 0.2, 0.33, 0.7}) EXPECT_EQ(back.cdf(t), s.cdf(t));
    }
    EXPECT_THROW(set_from_string("maxstab-set 2\nend\n"), std::runtime_error);
}

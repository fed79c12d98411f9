#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/time_change.hpp"

using namespace maxstab;

TEST(TimeChange, HalfInterval) {
    const CensorSet e = make_elementary({{0.0, 0.5}});
    const TimeGrid g(0.0, 1.0, 8);
    const TimeChange tc = build_time_change(e, g);
    EXPECT_DOUBLE_EQ(tc.total, 0.5);
    for (std::size_t k = 0; k < g.nodes(); ++k) EXPECT_NEAR(tc.rho[k], std::min(g.time(k), 0.5), 1e-15);
    for (std::size_t j = 0; j + 1 < tc.range.nodes(); ++j) EXPECT_NEAR(tc.zeta[j], tc.range.time(j), 1e-12);
}

TEST(TimeChange, WindowIsIdentity) {
    const CensorSet e = make_elementary({{0.0, 1.0}});
    const TimeChange tc = build_time_change(e, TimeGrid(0.0, 1.0, 6));
    EXPECT_EQ(tc.range.level(), 6);
    for (std::size_t j = 0; j + 1 < tc.range.nodes(); ++j) EXPECT_NEAR(tc.zeta[j], tc.range.time(j), 1e-12);
}

TEST(TimeChange, DegenerateSetThrows) {
    EXPECT_THROW(build_time_change(make_elementary({}), TimeGrid(0.0, 1.0, 8)),
                 std::invalid_argument);
}

TEST(TimeChange, FatCantorPushforward) {
    const CensorSet e = make_cantor(alpha_schedule(3.0, 16));
    const TimeChange tc = build_time_change(e, TimeGrid(0.0, 1.0, 12));
    Engine rng = make_engine(3, {kTagPoints, 12, 1});
    const PushforwardCheck c = check_pushforward(e, tc, 50, rng);
    EXPECT_TRUE(c.pass) << c.passed << "/" << c.intervals << " max error " << c.max_error;
}

TEST(TimeChange, SecondMomentAndCorrespondence) {
    const CensorSet e = make_cantor(alpha_schedule(3.0, 16));
    const TimeChange tc = build_time_change(e, TimeGrid(0.0, 1.0, 11));
    const TimeChangeRun r = run_time_change(e, tc, 3000, 5, 1, 1, 8);
    ASSERT_EQ(r.s.size(), 5u);
    for (std::size_t i = 0; i < r.s.size(); ++i)
        EXPECT_NEAR(r.second_moment[i].mean(), r.s[i], 4 * r.second_moment[i].stderr_());
    EXPECT_GT(r.corr.forward_total, 0u);
    EXPECT_GE(r.corr.rate(), 0.95);
}

TEST(TimeChange, CensoredMaximaNeedMass) {
    // maxima of the censored path appear in a subwindow only where E has mass there
    const CensorSet e = make_elementary({{0.1, 0.4}});
    const TimeGrid g(0.0, 1.0, 10);
    std::size_t inside = 0, outside = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        Engine rng = make_engine(6, {kTagCoupled, 10, r});
        const CoupledSample s = draw_coupled(e, g, rng);
        for (auto k : maxima_indices(s.censored, 2)) {
            const double t = g.time(k);
            (t > 0.1 && t < 0.4 ? inside : outside) += 1;
        }
    }
    EXPECT_GT(inside, 0u);
    EXPECT_EQ(outside, 0u);
}

#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/subordinator.hpp"

using namespace maxstab;

namespace {

SubordinatorParams stable_half() {
    SubordinatorParams p;
    p.tail = TailKind::Stable;
    p.rho = 0.5;
    p.scale = 1.0;
    p.drift = 1.0;
    p.x_min = 1e-6;
    return p;
}

SubordinatorParams log_tail(double gamma) {
    SubordinatorParams p;
    p.tail = TailKind::LogTail;
    p.gamma = gamma;
    p.drift = 1.0;
    p.x_min = 1e-9;
    return p;
}

}  // namespace

TEST(Subordinator, TailMasses) {
    const auto s = stable_half();
    EXPECT_DOUBLE_EQ(tail_mass(s, 0.25), 2.0);
    const auto l = log_tail(3.0);
    // vanishes at the support cutoff and decreases towards it
    EXPECT_NEAR(tail_mass(l, tail_cutoff(l)), 0.0, 1e-12);
    EXPECT_GT(tail_mass(l, 1e-6), tail_mass(l, 1e-4));
    SubordinatorParams none;
    EXPECT_EQ(tail_mass(none, 0.1), 0.0);
}

TEST(Subordinator, TruncationBias) {
    const auto s = stable_half();
    // c rho / (1 - rho) x_min^(1 - rho)
    EXPECT_NEAR(truncation_bias_rate(s), 1e-3, 1e-15);
    const auto l = log_tail(3.0);
    const double L = std::log(1e9);
    EXPECT_NEAR(truncation_bias_rate(l), std::pow(L, -2.0) / 2.0 - std::pow(L, -3.0), 1e-15);
}

TEST(Subordinator, PredictedLabels) {
    EXPECT_EQ(predicted_label(stable_half()), Predicted::Stable);
    EXPECT_EQ(predicted_label(log_tail(3.0)), Predicted::Unstable);
    EXPECT_EQ(predicted_label(log_tail(3.1)), Predicted::Gap);
    EXPECT_EQ(predicted_label(log_tail(4.0)), Predicted::Stable);
}

TEST(Subordinator, DriftOnlyCoversWindow) {
    SubordinatorParams p;
    p.drift = 2.0;
    Engine rng = make_engine(1, {kTagSubordinator, 0});
    const auto s = sample_subordinator_range(p, 0.0, rng);
    EXPECT_EQ(s.info.jumps, 0u);
    EXPECT_NEAR(s.set.total(), 1.0, 1e-12);
}

TEST(Subordinator, RangeMeasureIsDriftTimesHorizon) {
    // the range of d t + jumps has Lebesgue measure d T exactly
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Engine rng = make_engine(seed, {kTagSubordinator, 0});
        const auto s = sample_subordinator_range(stable_half(), 0.0, rng);
        EXPECT_NEAR(s.set.measure(0.0, s.info.range_end), s.info.horizon, 1e-9);
        EXPECT_GT(s.info.jumps, 0u);
        EXPECT_GE(s.info.range_end, 1.0);
    }
}

TEST(Subordinator, JumpCountMatchesIntensity) {
    // Poisson count with mean T * tail_mass(x_min)
    auto p = stable_half();
    p.x_min = 1e-4;
    double total = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Engine rng = make_engine(9, {kTagSubordinator, static_cast<std::uint64_t>(r)});
        total += static_cast<double>(sample_subordinator_range(p, 1.0, rng).info.jumps);
    }
    const double mean = total / reps, expect = tail_mass(p, p.x_min);
    EXPECT_NEAR(mean, expect, 4.0 * std::sqrt(expect / reps));
}

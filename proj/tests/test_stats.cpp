#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/rng.hpp"
#include "maxstab/stats.hpp"

using namespace maxstab;

namespace {

Estimate tight(double mean) {
    // 10^4 values with the given mean and tiny spread
    Estimate e;
    e.label = "x";
    e.proportion = false;
    for (int i = 0; i < 10000; ++i) e.add(mean + ((i % 2) ? 0.01 : -0.01));
    return e;
}

}  // namespace

TEST(Estimate, WilsonBracketsMean) {
    const Estimate e = Estimate::of_proportion("p", 3, 1000);
    EXPECT_DOUBLE_EQ(e.mean(), 0.003);
    EXPECT_LT(e.ci_lo(), e.mean());
    EXPECT_GT(e.ci_hi(), e.mean());
    EXPECT_GT(e.ci_lo(), 0.0);
    const Estimate zero = Estimate::of_proportion("p", 0, 50);
    EXPECT_EQ(zero.ci_lo(), 0.0);
    EXPECT_GT(zero.ci_hi(), 0.0);
}

TEST(Estimate, MergeIdentityAndCommutativity) {
    const Estimate a = Estimate::of_values("v", {1.0, 2.5, -3.0});
    const Estimate b = Estimate::of_values("v", {0.25, 7.0});
    const Estimate empty;
    const Estimate ae = merge(a, empty);
    EXPECT_EQ(ae.n, a.n);
    EXPECT_EQ(ae.sum, a.sum);
    EXPECT_EQ(ae.sumsq, a.sumsq);
    const Estimate ab = merge(a, b), ba = merge(b, a);
    EXPECT_EQ(ab.n, ba.n);
    EXPECT_EQ(ab.sum, ba.sum);
    EXPECT_EQ(ab.sumsq, ba.sumsq);
}

TEST(Estimate, MergeRejectsLabelMismatch) {
    EXPECT_THROW(merge(Estimate::of_proportion("a", 1, 2), Estimate::of_proportion("b", 1, 2)), std::invalid_argument);
}

TEST(Estimate, ShardsEqualPooledSample) {
    Engine rng = make_engine(3, {kTagCalibration, 1});
    std::bernoulli_distribution coin(0.3);
    Estimate pooled = Estimate::of_proportion("p", 0, 0), sharded = pooled;
    std::uint64_t total_hits = 0;
    for (int s = 0; s < 10; ++s) {
        std::uint64_t hits = 0;
        for (int i = 0; i < 1000; ++i) hits += coin(rng);
        total_hits += hits;
        sharded = merge(sharded, Estimate::of_proportion("p", hits, 1000));
    }
    pooled = Estimate::of_proportion("p", total_hits, 10000);
    EXPECT_EQ(sharded.n, pooled.n);
    EXPECT_EQ(sharded.sum, pooled.sum);
}

TEST(Trend, Patterns) {
    const std::vector<double> L{8, 10, 12};
    EXPECT_EQ(trend(L, {tight(0.2), tight(0.5), tight(0.9)}).verdict, Trend::Increasing);
    EXPECT_EQ(trend(L, {tight(0.9), tight(0.5), tight(0.2)}).verdict, Trend::Decreasing);
    EXPECT_EQ(trend(L, {tight(0.5), tight(0.5), tight(0.5)}).verdict, Trend::Flat);
    EXPECT_EQ(trend(L, {tight(0.2), tight(0.9), tight(0.5)}).verdict, Trend::Mixed);
    EXPECT_THROW(trend({8, 10}, {tight(0.1), tight(0.2)}), std::invalid_argument);
}

TEST(Ks, ConstantSampleFails) {
    std::vector<double> s(200, 0.5);
    EXPECT_FALSE(ks_uniformity(s, [](double x) { return std::clamp(x, 0.0, 1.0); }).pass);
    EXPECT_THROW(ks_uniformity(std::vector<double>(50, 0.1), [](double x) { return x; }), std::invalid_argument);
}

TEST(Ks, CalibratedOnReferenceSamples) {
    int pass = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Engine rng = make_engine(11, {kTagCalibration, 2, static_cast<std::uint64_t>(rep)});
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::vector<double> s(500);
        for (auto& x : s) x = U(rng);
        pass += ks_uniformity(s, [](double x) { return std::clamp(x, 0.0, 1.0); }).pass;
    }
    EXPECT_GE(pass, 95);
}

TEST(Wilson, CoverageCalibration) {
    for (double p : {0.01, 0.5, 0.99}) {
        Engine rng = make_engine(5, {kTagCalibration, 3, static_cast<std::uint64_t>(p * 100)});
        std::binomial_distribution<int> B(1000, p);
        int covered = 0;
        const int reps = 2000;
        for (int r = 0; r < reps; ++r) {
            const auto w = wilson(B(rng), 1000);
            covered += w.lo <= p && p <= w.hi;
        }
        EXPECT_GE(covered, static_cast<int>(0.93 * reps)) << "p = " << p;
    }
}

TEST(Arcsine, Cdf) {
    EXPECT_DOUBLE_EQ(arcsine_cdf(0.0), 0.0);
    EXPECT_DOUBLE_EQ(arcsine_cdf(1.0), 1.0);
    EXPECT_NEAR(arcsine_cdf(0.5), 0.5, 1e-15);
}

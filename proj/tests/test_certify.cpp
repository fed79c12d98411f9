#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/certify.hpp"

using namespace maxstab;

TEST(RateFunction, IntegralClassification) {
    EXPECT_EQ(g_integral_classify(RateFunction::log_power(2.0)), Integral::Converges);
    EXPECT_EQ(g_integral_classify(RateFunction::log_power(1.0)), Integral::Diverges);
    EXPECT_EQ(g_integral_classify(RateFunction::log_power(0.5)), Integral::Diverges);
    EXPECT_EQ(g_integral_classify(RateFunction::power(0.1)), Integral::Converges);
    std::vector<double> h, g;
    for (int j = 2; j <= 30; ++j) {
        h.push_back(std::ldexp(1.0, -j));
        g.push_back(std::pow(std::log(1.0 / h.back()), -2.0));
    }
    std::reverse(h.begin(), h.end());
    std::reverse(g.begin(), g.end());
    EXPECT_EQ(g_integral_classify(RateFunction::tabulated(h, g)), Integral::Converges);
    EXPECT_THROW(RateFunction::tabulated({0.1, 0.2}, {1.0, 0.5}), std::invalid_argument);
}

TEST(DensityProfile, FullWindowHasNoDeficit) {
    const CensorSet w = make_cantor(std::vector<double>(8, 0.0));
    const auto d = density_profile(w, 0.5, dyadic_scales(2, 10));
    for (std::size_t j = 0; j < d.h.size(); ++j) {
        EXPECT_EQ(d.deficit_right[j], 0.0);
        EXPECT_EQ(d.deficit_left[j], 0.0);
    }
    const auto edge = density_profile(w, 0.01, dyadic_scales(2, 4));
    EXPECT_TRUE(std::isnan(edge.deficit_left[0]));
}

TEST(CertifyRate, WindowIsTriviallyStable) {
    const CensorSet w = make_cantor(std::vector<double>(20, 0.0));
    Engine rng = make_engine(1, {kTagPoints, 0});
    const auto pts = sample_points(w, 100, rng);
    const RateReport r = certify_rate(w, pts, dyadic_scales(4, 16), RateFunction::log_power(2.0));
    EXPECT_TRUE(r.zero_deficit);
    EXPECT_EQ(r.verdict, RateVerdict::StableCriterionMet);
}

TEST(BuildCantor, AlphaFourCertifies) {
    const CantorBuild b = build_cantor(4.0, 20);
    EXPECT_TRUE(b.certified) << b.message;
    EXPECT_GE(b.report.exponent, 3.5);
    EXPECT_LE(b.report.exponent, 4.5);
    EXPECT_EQ(b.report.verdict, RateVerdict::StableCriterionMet);
}

TEST(BuildCantor, AlphaTwoCertifies) {
    const CantorBuild b = build_cantor(2.0, 20);
    EXPECT_TRUE(b.certified) << b.message;
    EXPECT_GE(b.report.exponent, 1.6);
    EXPECT_LE(b.report.exponent, 2.4);
    EXPECT_EQ(b.report.verdict, RateVerdict::UnstableCriterionMet);
}

TEST(BuildCantor, ShallowBuildFailsCertification) {
    const CantorBuild b = build_cantor(2.0, 3);
    EXPECT_FALSE(b.certified) << b.message;
}

TEST(BuildCantor, Preconditions) {
    EXPECT_THROW(build_cantor(0.0, 10), std::invalid_argument);
    EXPECT_THROW(build_cantor(2.0, 41), std::invalid_argument);
}

TEST(PhiBound, ThresholdMonotoneInCPrime) {
    const PhiBoundReport tight = phi_bound_check(1.0, 1.01);
    const PhiBoundReport loose = phi_bound_check(1.0, 2.0);
    EXPECT_TRUE(tight.holds_below_threshold);
    EXPECT_TRUE(loose.holds_below_threshold);
    // "smaller u" means larger log(1/u)
    EXPECT_GT(tight.log_threshold, loose.log_threshold);
    EXPECT_LT(tight.threshold, loose.threshold);
    EXPECT_THROW(phi_bound_check(1.0, 1.0), std::invalid_argument);
}

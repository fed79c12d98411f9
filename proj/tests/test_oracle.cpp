#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/oracle.hpp"

using namespace maxstab;

namespace {

const std::string kFixture = std::string(FIXTURE_DIR) + "/oracle_matrix_v1.txt";

}  // namespace

TEST(Oracle, FixtureParses) {
    const auto cases = read_oracle_matrix(kFixture);
    EXPECT_GE(cases.size(), 200u);
    for (const auto& c : cases) {
        EXPECT_LE(c.n, 4);
        EXPECT_TRUE(c.has_expected) << c.id;
    }
}

TEST(Oracle, ExactIdentityOnFixture) {
    for (const auto& c : read_oracle_matrix(kFixture)) {
        const OracleResult r = brute_force_oracle(c);
        EXPECT_EQ(r.lhs, r.rhs) << c.id;
        EXPECT_EQ(r.rhs, c.expected_rhs) << c.id;
        EXPECT_GE(r.lhs, 0) << c.id;
    }
}

TEST(Oracle, ParseErrors) {
    EXPECT_THROW(brute_force_oracle(parse_oracle_case("case x n=2 E=1 pieces=0:2:one:1:0:2")), std::invalid_argument);
    EXPECT_THROW(brute_force_oracle(parse_oracle_case("case x n=7 E=1111111 pieces=0:7:one:1:0:7")),
                 std::invalid_argument);
    EXPECT_THROW(parse_oracle_case("case x n=2 E=11 pieces=0:2:cube:1:0:2"), std::runtime_error);
    EXPECT_THROW(parse_oracle_case("case x n=2 E=11 colour=red"), std::runtime_error);
}

TEST(Oracle, SmallCaseByHand) {
    // n = 2, E = all: both walks coincide; a strict maximum at node 1 has
    // probability 1/4 and its sign is shared, so both sides equal 1/4
    const OracleCase c = parse_oracle_case("case hand n=2 E=11 pieces=0:2:one:1:0:2");
    const OracleResult r = brute_force_oracle(c);
    EXPECT_EQ(r.lhs, Rational(1, 4));
    EXPECT_EQ(r.rhs, Rational(1, 4));
}

TEST(Oracle, MonteCarloAgrees) {
    const auto cases = read_oracle_matrix(kFixture);
    int checked = 0;
    for (const auto& c : cases) {
        if (c.n != 4 || checked >= 6) continue;
        ++checked;
        const OracleMC m = oracle_monte_carlo(c, 20000, 1 + checked);
        const OracleResult r = brute_force_oracle(c);
        EXPECT_NEAR(m.lhs.mean(), static_cast<double>(r.lhs), 4 * m.lhs.stderr_() + 1e-12) << c.id;
        EXPECT_NEAR(m.rhs.mean(), static_cast<double>(r.rhs), 4 * m.rhs.stderr_() + 1e-12) << c.id;
    }
    EXPECT_EQ(checked, 6);
}
